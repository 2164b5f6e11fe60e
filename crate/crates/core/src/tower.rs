//! The p-descent tower: repeatedly pass to the kernel of the maximal
//! elementary abelian p-quotient and certify each level.
//!
//! Levels are numbered relative to the input: the input is level 0, its
//! kernel is level 1, and so on.

use serde::Serialize;
use thiserror::Error;

use crate::abelian::{betti_number, elementary_abelian_quotient, h1_fp_rank, AbelianError, BettiMethod};
use crate::baerq::{certify_expp_elementary, BaerError, BaerQuotientReport, ExpPCertificate};
use crate::cosets::{table_from_phom, CosetError, DEFAULT_COSET_CAP};
use crate::fpres::Presentation;
use crate::rewrite::{rewrite_subgroup_presentation, tietze_simplify, DEFAULT_TIETZE_BUDGET};

/// Rank of the mod-p quotient that the Betti-zero argument needs.
pub const PROP1_RANK: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub coset_cap: usize,
    pub gen_cap: usize,
    pub max_depth: usize,
    pub tietze_budget: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            coset_cap: DEFAULT_COSET_CAP,
            gen_cap: 5000,
            max_depth: 3,
            tietze_budget: DEFAULT_TIETZE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error("simplified kernel has {ngens} generators, above the cap of {cap}")]
    GeneratorCap { ngens: usize, cap: usize },
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Baer(#[from] BaerError),
    #[error("theorem contradiction at level {level}: {detail}")]
    TheoremContradiction { level: usize, detail: String },
    #[error("depth must be at least 1")]
    BadDepth,
}

impl TowerError {
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            TowerError::Coset(CosetError::TooManyCosets { .. })
                | TowerError::Coset(CosetError::EnumerationOverflow { .. })
                | TowerError::GeneratorCap { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelCertificate {
    pub level: usize,
    pub index_in_parent: u64,
    pub index_in_root: u64,
    pub ngens_raw: usize,
    pub nrelators_raw: usize,
    pub ngens: usize,
    pub nrelators: usize,
    pub h1_fp_rank: usize,
    pub betti: usize,
    pub betti_method: BettiMethod,
    pub expp_elementary: bool,
    /// Rank of `G/G^p` when it is elementary abelian.
    pub expp_rank: Option<usize>,
    pub expp_unconditional: bool,
    pub baer: BaerQuotientReport,
    pub fingerprint: String,
}

impl LevelCertificate {
    pub fn rational_homology_sphere(&self) -> bool {
        self.betti == 0
    }

    fn satisfies_prop1_hypothesis(&self) -> bool {
        self.expp_elementary && self.expp_rank == Some(PROP1_RANK)
    }
}

/// Certificate for a presentation sitting at `level` of a tower.
pub fn certify_level(
    pres: &Presentation,
    p: u32,
    level: usize,
    index_in_parent: u64,
    index_in_root: u64,
    raw: (usize, usize),
) -> Result<LevelCertificate, TowerError> {
    let h1 = h1_fp_rank(pres, p).map_err(AbelianError::from)?;
    let (betti, betti_method) = betti_number(pres);
    let expp = certify_expp_elementary(pres, p)?;
    Ok(LevelCertificate {
        level,
        index_in_parent,
        index_in_root,
        ngens_raw: raw.0,
        nrelators_raw: raw.1,
        ngens: pres.ngens(),
        nrelators: pres.relators().len(),
        h1_fp_rank: h1,
        betti,
        betti_method,
        expp_elementary: expp.elementary_abelian,
        expp_rank: expp.elementary_abelian.then_some(expp.rank),
        expp_unconditional: expp.unconditional,
        baer: expp.report,
        fingerprint: pres.fingerprint(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descent {
    pub kernel: Presentation,
    pub raw_kernel: Presentation,
    pub cert: LevelCertificate,
}

/// Kernel of the maximal elementary abelian p-quotient, rewritten and
/// simplified, with a certificate for it (as level 1 of a fresh tower).
pub fn descend_once(pres: &Presentation, p: u32, caps: &Caps) -> Result<Descent, TowerError> {
    let h = elementary_abelian_quotient(pres, p)?;
    if h.rank() == 0 {
        let raw = (pres.ngens(), pres.relators().len());
        return Ok(Descent {
            kernel: pres.clone(),
            raw_kernel: pres.clone(),
            cert: certify_level(pres, p, 1, 1, 1, raw)?,
        });
    }
    let table = table_from_phom(pres, &h, caps.coset_cap)?;
    let index = table.len() as u64;
    let raw = rewrite_subgroup_presentation(pres, &table).presentation;
    let kernel = tietze_simplify(&raw, caps.tietze_budget);
    if kernel.ngens() > caps.gen_cap {
        return Err(TowerError::GeneratorCap {
            ngens: kernel.ngens(),
            cap: caps.gen_cap,
        });
    }
    let cert = certify_level(&kernel, p, 1, index, index, (raw.ngens(), raw.relators().len()))?;
    Ok(Descent {
        kernel,
        raw_kernel: raw,
        cert,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerReport {
    pub p: u32,
    pub root_fingerprint: String,
    pub root: LevelCertificate,
    pub levels: Vec<LevelCertificate>,
    /// The root satisfies the rank-3 hypothesis.
    pub prop1_hypothesis: bool,
    /// First level (root included) satisfying the rank-3 hypothesis;
    /// every deeper level is held to the Betti-zero conclusion.
    pub prop1_anchor_level: Option<usize>,
    pub truncated: Option<String>,
}

/// Hypothesis check with the evidence behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prop1Evidence {
    pub holds: bool,
    pub h1_fp_rank: usize,
    pub certificate: ExpPCertificate,
}

/// True iff `G/G^p` is certified elementary abelian of rank 3.
pub fn check_prop1_hypothesis(pres: &Presentation, p: u32) -> Result<Prop1Evidence, TowerError> {
    let certificate = certify_expp_elementary(pres, p)?;
    let h1 = h1_fp_rank(pres, p).map_err(AbelianError::from)?;
    Ok(Prop1Evidence {
        holds: certificate.elementary_abelian && certificate.rank == PROP1_RANK,
        h1_fp_rank: h1,
        certificate,
    })
}

fn enforce(anchor: Option<usize>, cert: &LevelCertificate) -> Result<(), TowerError> {
    let Some(anchor) = anchor else { return Ok(()) };
    if cert.level <= anchor || !cert.expp_unconditional {
        return Ok(());
    }
    if cert.betti != 0 {
        return Err(TowerError::TheoremContradiction {
            level: cert.level,
            detail: format!("betti = {} below a rank-3 level {anchor}", cert.betti),
        });
    }
    if cert.h1_fp_rank > PROP1_RANK {
        return Err(TowerError::TheoremContradiction {
            level: cert.level,
            detail: format!("dim H^1(F_p) = {} exceeds 3 below level {anchor}", cert.h1_fp_rank),
        });
    }
    Ok(())
}

/// Run `depth` descent steps. Resource caps end the tower early with a
/// truncation note; a violated Betti-zero conclusion is an error.
pub fn descend(pres: &Presentation, p: u32, depth: usize, caps: &Caps) -> Result<TowerReport, TowerError> {
    if depth == 0 {
        return Err(TowerError::BadDepth);
    }
    let nraw = (pres.ngens(), pres.relators().len());
    let root = certify_level(pres, p, 0, 1, 1, nraw)?;
    let prop1_hypothesis = root.satisfies_prop1_hypothesis();
    let mut anchor = prop1_hypothesis.then_some(0);
    let mut report = TowerReport {
        p,
        root_fingerprint: pres.fingerprint(),
        root,
        levels: Vec::new(),
        prop1_hypothesis,
        prop1_anchor_level: anchor,
        truncated: None,
    };

    let steps = depth.min(caps.max_depth);
    let mut current = pres.clone();
    let mut index_in_root = 1u64;
    for level in 1..=steps {
        let parent_rank = report.levels.last().unwrap_or(&report.root).h1_fp_rank;
        let step = match descend_once(&current, p, caps) {
            Ok(d) => d,
            Err(e) if e.is_resource() => {
                report.truncated = Some(format!("level {level}: {e}"));
                return Ok(report);
            }
            Err(e) => return Err(e),
        };
        let mut cert = step.cert;
        debug_assert_eq!(Some(cert.index_in_parent), (p as u64).checked_pow(parent_rank as u32));
        index_in_root = index_in_root.saturating_mul(cert.index_in_parent);
        cert.level = level;
        cert.index_in_root = index_in_root;
        enforce(anchor, &cert)?;
        if anchor.is_none() && cert.satisfies_prop1_hypothesis() {
            anchor = Some(level);
        }
        report.levels.push(cert);
        current = step.kernel;
    }
    if depth > steps {
        report.truncated = Some(format!("depth {depth} exceeds the depth cap {}", caps.max_depth));
    }
    report.prop1_anchor_level = anchor;
    Ok(report)
}
