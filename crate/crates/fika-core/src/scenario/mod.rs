//! Scenario generation: prompt assembly, static validation, LLM providers,
//! execution adapters and the iterative generate/validate/run engine.

pub mod adapter;
pub mod engine;
pub mod fixture;
pub mod prompt;
pub mod provider;
pub mod validate;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::MethodId;

/// Default bound on generate/repair attempts per target.
pub const DEFAULT_MAX_ATTEMPTS: u32 = 5;
/// Default prompt size cap in characters.
pub const DEFAULT_PROMPT_CHAR_CAP: usize = 32_000;

/// Prompt ablation modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PromptMode {
    /// Direct-caller snippet only.
    #[serde(rename = "BL1", alias = "bl1")]
    Bl1,
    /// Path listing plus every hop snippet.
    #[serde(rename = "BL2", alias = "bl2")]
    Bl2,
    /// BL2 plus instantiation context and attempt feedback.
    #[serde(rename = "FULL", alias = "full")]
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptConfig {
    pub mode: PromptMode,
    pub max_attempts: u32,
    pub prompt_char_cap: usize,
}

impl Default for PromptConfig {
    fn default() -> Self {
        PromptConfig {
            mode: PromptMode::Full,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            prompt_char_cap: DEFAULT_PROMPT_CHAR_CAP,
        }
    }
}

/// The (direct caller, tpl method) pair that identifies a tpl call site.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SitePair {
    pub m_dp: MethodId,
    pub m_tpl: MethodId,
}

/// First 12 hex chars of SHA-256, used in artifact names.
pub fn short_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    hex[..12].to_string()
}

impl SitePair {
    /// Stable artifact key `<m_dp-hash>_<m_tpl-hash>`.
    pub fn key(&self) -> String {
        format!("{}_{}", short_hash(self.m_dp.as_str()), short_hash(self.m_tpl.as_str()))
    }
}

/// One attempt of the generate/validate/run loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptRecord {
    /// 1-based attempt number.
    pub attempt_index: u32,
    pub static_validation: bool,
    pub compiled: bool,
    pub executed: bool,
    pub target_reached: bool,
    /// Present exactly when the attempt failed and another attempt follows.
    pub feedback: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Reached,
    Exhausted,
    SkippedDuplicate,
    /// Provider or adapter failure ended the target early.
    Aborted,
}

/// Result of processing one (entry, m_dp, m_tpl) tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub site: SitePair,
    pub entry: MethodId,
    pub path_length: usize,
    pub status: OutcomeStatus,
    pub attempts: Vec<AttemptRecord>,
    /// File name (not path) of the successful scenario.
    pub scenario_file: Option<String>,
    /// LCOV text of the successful run.
    pub lcov: Option<String>,
    /// Abort reason when status is `aborted`.
    pub error: Option<String>,
}
