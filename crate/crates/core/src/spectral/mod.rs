//! Pseudo-spectral solver on flat tori (placeholder).
