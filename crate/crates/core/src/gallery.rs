//! Gallery (stub).
