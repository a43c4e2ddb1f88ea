//! Batch front-end.
pub fn placeholder() {}
