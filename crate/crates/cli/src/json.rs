//! Machine-readable views printed under `--json`. Field names are stable.

use serde::Serialize;

use shellsat_core::format::{write_collapse, write_saturation, write_shelling};
use shellsat_core::{ChainReport, Complex, Graph};

#[derive(Serialize)]
pub struct Info {
    pub fingerprint: String,
    pub f_vector: Vec<usize>,
    pub dimension: isize,
    pub reduced_euler_characteristic: i64,
    pub pure: bool,
    /// `null` above dimension two.
    pub flag: Option<bool>,
    pub connected: bool,
}

impl Info {
    pub fn of(k: &Complex) -> Info {
        Info {
            fingerprint: k.fingerprint(),
            f_vector: k.f_vector().counts().to_vec(),
            dimension: k.dimension(),
            reduced_euler_characteristic: k.reduced_euler_characteristic(),
            pure: k.is_pure(),
            flag: k.is_flag2().ok(),
            connected: k.is_connected(),
        }
    }
}

/// Result of `shell`, `collapse` and `wsat`, in search or verify mode.
#[derive(Serialize)]
pub struct Decision {
    pub command: &'static str,
    /// `"holds"`, `"refuted"` or `"budget-exceeded"`.
    pub verdict: &'static str,
    pub detail: String,
    /// Search nodes spent; 0 when verifying.
    pub nodes: u64,
    pub certificate: Option<String>,
}

#[derive(Serialize)]
pub struct StageView {
    pub stage: &'static str,
    /// `"passed"`, `"refuted"`, `"failed"` or `"skipped"`.
    pub status: &'static str,
    pub detail: Option<String>,
    pub certificate: Option<String>,
}

#[derive(Serialize)]
pub struct Chain {
    pub input_fingerprint: String,
    pub subdivisions: u32,
    pub subject_fingerprint: String,
    pub f_vector: Vec<usize>,
    pub reduced_euler_characteristic: i64,
    pub removed_count: Option<usize>,
    pub stages: Vec<StageView>,
}

impl Chain {
    pub fn of(report: &ChainReport) -> Chain {
        use shellsat_core::Stage;
        let l = &report.subject;
        let stages = report
            .stages
            .iter()
            .map(|s| StageView {
                stage: s.stage.name(),
                status: s.status.label(),
                detail: s.status.detail().map(String::from),
                certificate: match s.stage {
                    Stage::Shelling => report.shelling.as_ref().map(|c| write_shelling(l, c)),
                    Stage::Saturation => report
                        .saturation
                        .as_ref()
                        .map(|c| write_saturation(&Graph::one_skeleton(l), c)),
                    Stage::Collapse => report.collapse.as_ref().map(|c| write_collapse(l, c)),
                    Stage::RemovalCount => None,
                },
            })
            .collect();
        Chain {
            input_fingerprint: report.input_fingerprint.clone(),
            subdivisions: report.subdivisions,
            subject_fingerprint: l.fingerprint(),
            f_vector: l.f_vector().counts().to_vec(),
            reduced_euler_characteristic: report.chi,
            removed_count: report.removed_count,
            stages,
        }
    }
}

pub fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}
