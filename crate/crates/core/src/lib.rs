//! Adaptive single-trial error/erasure decoding of Reed-Solomon codes over
//! square QAM with AWGN.
//!
//! The receiver erases the `tau` least reliable symbols before one algebraic
//! decoding attempt. [`strategy`] picks `tau` from the symbol unreliabilities
//! so that the residual codeword error probability is minimal, [`sim`] checks
//! the prediction by Monte-Carlo simulation.

pub mod cli;
pub mod dcf;
pub mod error;
pub mod gf;
pub mod gmd;
pub mod modem;
pub mod rs_codec;
pub mod sim;
pub mod stats;
pub mod strategy;

pub use dcf::{DecoderCapability, DecoderKind};
pub use error::{Error, Result};
pub use gf::{Field, FieldElement, FieldSpec};
pub use gmd::{gmd_decode, GmdConfig};
pub use modem::{Constellation, UnreliabilityLut, UnreliabilityMethod};
pub use rs_codec::{CodeParams, DecodeOutcome, ReceivedWord, RsCodec};
pub use sim::{run_campaign, CampaignConfig, DecoderMode, FerPoint};
pub use strategy::{StrategyKind, StrategyResult, UnreliabilityVector};
