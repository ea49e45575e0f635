//! Small shared numerics: coefficient formatting, 1-D/\(n\)-D optimizers and
//! adaptive quadrature.

use num_complex::Complex64;

/// Renders one term `coeff·mono` with its joining sign.
///
/// Rust's `Display` for `f64` is shortest-roundtrip decimal (never scientific
/// notation), so the output re-parses to exactly the same coefficient.
pub fn format_coeff(c: Complex64, mono: &str, first: bool) -> String {
    let (neg, body) = coeff_body(c, mono);
    match (first, neg) {
        (true, false) => body,
        (true, true) => format!("-{body}"),
        (false, false) => format!(" + {body}"),
        (false, true) => format!(" - {body}"),
    }
}

fn coeff_body(c: Complex64, mono: &str) -> (bool, String) {
    let join = |coeff: String| {
        if mono.is_empty() {
            coeff
        } else if coeff.is_empty() {
            mono.to_owned()
        } else {
            format!("{coeff}*{mono}")
        }
    };
    if c.im == 0.0 {
        let a = c.re.abs();
        let coeff = if a == 1.0 && !mono.is_empty() {
            String::new()
        } else {
            format!("{a}")
        };
        (c.re < 0.0, join(coeff))
    } else if c.re == 0.0 {
        let b = c.im.abs();
        let coeff = if b == 1.0 {
            "i".to_owned()
        } else {
            format!("{b}*i")
        };
        (c.im < 0.0, join(coeff))
    } else {
        let re = format!("{}", c.re);
        let im = if c.im.abs() == 1.0 {
            "i".to_owned()
        } else {
            format!("{}*i", c.im.abs())
        };
        let sign = if c.im < 0.0 { '-' } else { '+' };
        (false, join(format!("({re} {sign} {im})")))
    }
}

/// Golden-section maximizer for a concave function on `[a, b]`.
///
/// Returns `(argmax, max)` with the argument located to absolute
/// tolerance `xtol`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Nelder–Mead minimizer; good enough for the low-dimensional spot checks
/// (kernel zero hunting, shell minimization) used in this crate.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    scale: f64,
    iters: usize,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let mut centroid = vec![0.0; n];
        for (k, v) in simplex.iter().enumerate() {
            if k == worst {
                continue;
            }
            for i in 0..n {
                centroid[i] += v[i] / n as f64;
            }
        }

        let lerp = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|i| centroid[i] + t * (simplex[worst][i] - centroid[i]))
                .collect()
        };

        let reflected = lerp(-1.0);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = lerp(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = lerp(0.5);
            let fc = f(&contracted);
            if fc < values[worst] {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                for k in 0..=n {
                    if k == best {
                        continue;
                    }
                    let v: Vec<f64> = (0..n)
                        .map(|i| 0.5 * (simplex[k][i] + simplex[best][i]))
                        .collect();
                    values[k] = f(&v);
                    simplex[k] = v;
                }
            }
        }
    }

    let mut best = 0;
    for k in 1..=start.len() {
        if values[k] < values[best] {
            best = k;
        }
    }
    (simplex[best].clone(), values[best])
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        // Argmax of a quadratic is only locatable to ~√ε, but the value
        // there is flat, so it is accurate to machine precision.
        let (x, v) = golden_max(|t| -(t - 2.0) * (t - 2.0) + 3.0, 0.0, 10.0, 1e-10);
        assert!((x - 2.0).abs() < 1e-6);
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_integrates_gaussian() {
        let v = adaptive_simpson(&|t: f64| (-t * t).exp(), -8.0, 8.0, 1e-12);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn nelder_mead_minimizes_quadratic() {
        let (x, v) = nelder_mead(
            |p| (p[0] - 1.0).powi(2) + (p[1] + 2.0).powi(2),
            &[5.0, 5.0],
            1.0,
            200,
        );
        assert!(v < 1e-10);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 2.0).abs() < 1e-4);
    }
}
