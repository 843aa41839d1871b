//! Strategy specifications and the default candidate space.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::canonical;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutMethod {
    Default,
    Trivial,
    NoiseAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingMethod {
    Basic,
    Lookahead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationMethod {
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DdSequence {
    XX,
    XY4,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompilationKnobs {
    pub optimization_level: u8,
    pub layout_method: LayoutMethod,
    pub routing_method: RoutingMethod,
    pub translation_method: TranslationMethod,
    pub seed: u64,
}

impl Default for CompilationKnobs {
    fn default() -> Self {
        CompilationKnobs {
            optimization_level: 1,
            layout_method: LayoutMethod::Default,
            routing_method: RoutingMethod::Basic,
            translation_method: TranslationMethod::Default,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuppressionKnobs {
    pub pauli_twirling: bool,
    pub num_twirls: u32,
    pub dynamical_decoupling: bool,
    pub dd_sequence: DdSequence,
    pub measurement_twirling: bool,
    pub suppression_seed: u64,
}

impl Default for SuppressionKnobs {
    fn default() -> Self {
        SuppressionKnobs {
            pauli_twirling: false,
            num_twirls: 4,
            dynamical_decoupling: false,
            dd_sequence: DdSequence::XX,
            measurement_twirling: false,
            suppression_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigationKnobs {
    pub readout_mitigation: bool,
    pub zne: bool,
    pub zne_scale_factors: Vec<u32>,
    pub zne_degree: u32,
}

impl Default for MitigationKnobs {
    fn default() -> Self {
        MitigationKnobs {
            readout_mitigation: false,
            zne: false,
            zne_scale_factors: vec![1, 3, 5],
            zne_degree: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuttingKnobs {
    pub cutting: bool,
    pub max_subcircuit_qubits: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuntimeKnobs {
    /// Carried as metadata only.
    pub resilience_level: Option<u8>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyParts {
    pub compilation: CompilationKnobs,
    pub suppression: SuppressionKnobs,
    pub mitigation: MitigationKnobs,
    pub cutting: CuttingKnobs,
    pub runtime: RuntimeKnobs,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StrategyError {
    #[error("optimization level {0} outside 0..=3")]
    OptimizationLevel(u8),
    #[error("num_twirls must be positive")]
    NumTwirls,
    #[error("zne scale factors must be odd, strictly increasing and start at 1: {0:?}")]
    ScaleFactors(Vec<u32>),
    #[error("zne degree {degree} needs more than {degree} scale factors, got {factors}")]
    Degree { degree: u32, factors: usize },
    #[error("max_subcircuit_qubits must be positive")]
    MaxSubcircuit,
}

/// Immutable, validated strategy. Build from [`StrategyParts`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "StrategyParts", into = "StrategyParts")]
pub struct StrategySpec(StrategyParts);

impl TryFrom<StrategyParts> for StrategySpec {
    type Error = StrategyError;

    fn try_from(p: StrategyParts) -> Result<Self, StrategyError> {
        if p.compilation.optimization_level > 3 {
            return Err(StrategyError::OptimizationLevel(p.compilation.optimization_level));
        }
        if p.suppression.num_twirls == 0 {
            return Err(StrategyError::NumTwirls);
        }
        let f = &p.mitigation.zne_scale_factors;
        let ok = f.first() == Some(&1) && f.iter().all(|x| x % 2 == 1) && f.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(StrategyError::ScaleFactors(f.clone()));
        }
        if p.mitigation.zne_degree == 0 || p.mitigation.zne_degree as usize >= f.len() {
            return Err(StrategyError::Degree {
                degree: p.mitigation.zne_degree,
                factors: f.len(),
            });
        }
        if p.cutting.max_subcircuit_qubits == Some(0) {
            return Err(StrategyError::MaxSubcircuit);
        }
        Ok(StrategySpec(p))
    }
}

impl From<StrategySpec> for StrategyParts {
    fn from(s: StrategySpec) -> Self {
        s.0
    }
}

impl StrategySpec {
    pub fn new(parts: StrategyParts) -> Result<Self, StrategyError> {
        parts.try_into()
    }

    /// Level 1, default layout, basic routing, nothing else enabled.
    pub fn baseline() -> Self {
        StrategySpec::default()
    }

    pub fn parts(&self) -> &StrategyParts {
        &self.0
    }
    pub fn compilation(&self) -> &CompilationKnobs {
        &self.0.compilation
    }
    pub fn suppression(&self) -> &SuppressionKnobs {
        &self.0.suppression
    }
    pub fn mitigation(&self) -> &MitigationKnobs {
        &self.0.mitigation
    }
    pub fn cutting(&self) -> &CuttingKnobs {
        &self.0.cutting
    }
    pub fn runtime(&self) -> &RuntimeKnobs {
        &self.0.runtime
    }

    /// Copy with modified parts, re-validated.
    pub fn modified(&self, f: impl FnOnce(&mut StrategyParts)) -> Result<Self, StrategyError> {
        let mut parts = self.0.clone();
        f(&mut parts);
        StrategySpec::new(parts)
    }

    /// Sorted-key JSON with every field explicit.
    pub fn canonical_json(&self) -> String {
        canonical::to_canonical_string(self)
    }

    pub fn digest(&self) -> String {
        canonical::sha256_hex(self.canonical_json())
    }

    /// Short human-readable summary.
    pub fn label(&self) -> String {
        let c = self.compilation();
        let layout = match c.layout_method {
            LayoutMethod::Default => "default",
            LayoutMethod::Trivial => "trivial",
            LayoutMethod::NoiseAware => "noise_aware",
        };
        let routing = match c.routing_method {
            RoutingMethod::Basic => "basic",
            RoutingMethod::Lookahead => "lookahead",
        };
        let mut label = format!("L{}/{layout}/{routing}", c.optimization_level);
        let s = self.suppression();
        if s.pauli_twirling {
            label.push_str(&format!("+pt{}", s.num_twirls));
        }
        if s.dynamical_decoupling {
            label.push_str(&format!("+dd:{:?}", s.dd_sequence));
        }
        if s.measurement_twirling {
            label.push_str("+mt");
        }
        if self.mitigation().readout_mitigation {
            label.push_str("+ro");
        }
        if self.mitigation().zne {
            label.push_str("+zne");
        }
        if self.cutting().cutting {
            label.push_str("+cut");
        }
        label
    }

    /// Which default-candidate group the strategy belongs to.
    pub fn group(&self) -> StrategyGroup {
        let s = self.suppression();
        if self.cutting().cutting {
            StrategyGroup::Cutting
        } else if self.mitigation().readout_mitigation || self.mitigation().zne {
            StrategyGroup::Mitigation
        } else if s.pauli_twirling || s.dynamical_decoupling || s.measurement_twirling {
            StrategyGroup::Suppression
        } else {
            StrategyGroup::Compilation
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyGroup {
    Compilation,
    Suppression,
    Mitigation,
    Cutting,
}

const COMPILATION_VARIANTS: [(LayoutMethod, RoutingMethod); 4] = [
    (LayoutMethod::Default, RoutingMethod::Basic),
    (LayoutMethod::NoiseAware, RoutingMethod::Basic),
    (LayoutMethod::Default, RoutingMethod::Lookahead),
    (LayoutMethod::Trivial, RoutingMethod::Basic),
];

/// Level at which suppression, mitigation and cutting variants are built.
const VARIANT_LEVEL: u8 = 2;

/// The default candidate list: 16 compilation sweeps, 4 suppression,
/// 2 mitigation and 1 cutting variant, de-duplicated by canonical form and
/// truncated to `max_candidates`.
pub fn default_candidates(max_candidates: usize) -> Vec<StrategySpec> {
    let mut all: Vec<StrategyParts> = Vec::with_capacity(24);
    for level in 0..=3u8 {
        for (layout, routing) in COMPILATION_VARIANTS {
            let mut p = StrategyParts::default();
            p.compilation.optimization_level = level;
            p.compilation.layout_method = layout;
            p.compilation.routing_method = routing;
            all.push(p);
        }
    }
    let base = {
        let mut p = StrategyParts::default();
        p.compilation.optimization_level = VARIANT_LEVEL;
        p
    };
    let with = |f: &dyn Fn(&mut StrategyParts)| {
        let mut p = base.clone();
        f(&mut p);
        p
    };
    all.push(with(&|p| p.suppression.pauli_twirling = true));
    all.push(with(&|p| p.suppression.dynamical_decoupling = true));
    all.push(with(&|p| {
        p.suppression.pauli_twirling = true;
        p.suppression.dynamical_decoupling = true;
    }));
    all.push(with(&|p| p.suppression.measurement_twirling = true));
    all.push(with(&|p| p.mitigation.readout_mitigation = true));
    all.push(with(&|p| p.mitigation.zne = true));
    all.push(with(&|p| {
        p.cutting.cutting = true;
        p.cutting.max_subcircuit_qubits = Some(2);
    }));

    let mut seen = HashSet::new();
    all.into_iter()
        .map(|p| StrategySpec::new(p).expect("default candidates are valid"))
        .filter(|s| seen.insert(s.clone()))
        .take(max_candidates)
        .collect()
}
