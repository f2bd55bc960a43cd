//! Exact-arithmetic tooling for building and checking math reasoning data.
//!
//! The crate covers the model-free half of a math-LLM data pipeline:
//!
//! - [`exact`] — arbitrary-precision integers, rationals, and fixed-scale
//!   decimals; the substrate every other module verifies against.
//! - [`expr`] / [`claims`] — an arithmetic expression grammar plus a scanner
//!   that pulls checkable calculation claims out of free text.
//! - [`trace`] — oracle-verifiable step-by-step calculation traces for ten
//!   task families, from bracket expressions to game-of-24 search.
//! - [`synth`] — seeded, template-diversified SFT record generation.
//! - [`rewrite`] — detection and expansion of single-jump calculation claims
//!   inside chain-of-thought text.
//! - [`corpus`] — MinHash-LSH near-duplicate removal and exact-formulation
//!   test-set decontamination.
//! - [`rerank`] — answer extraction/equivalence, best-of-N reranking
//!   (majority, outcome, process, external-check), Pass@K, completion-based
//!   step labeling, and reward-model training formats.
//!
//! Everything is deterministic given its seeds, and every emitted artifact
//! can be re-verified exactly. See the book under `book/` for a guided tour.

pub mod claims;
pub mod corpus;
pub mod exact;
pub mod jsonl;
pub mod expr;
pub mod rerank;
pub mod rewrite;
pub mod synth;
pub mod trace;

// Remaining modules land as they are built.
