//! Sweep orchestration (placeholder).
