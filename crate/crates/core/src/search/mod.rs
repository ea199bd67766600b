//! Baselines that do not involve learning: exhaustive enumeration of
//! interior-cell subsets, greedy construction and the fully filled chain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{derive_seed, map_indexed, rng_from_seed};
use crate::lindblad::{transfer_value, Backend, ChainGeometry, PhysicalConfig, TargetMode};
use crate::mdp::{realize_configuration, DisorderModel};
use crate::pattern::Pattern;
use crate::stats::SampleStats;

mod enumerate;

pub use enumerate::{binomial, subset_count, Subsets};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    pub max_added_particles: usize,
    pub evaluation_mode: TargetMode,
    /// Monte-Carlo realisations per pattern; 0 evaluates cell centres only.
    pub disorder_samples: usize,
    pub disorder: DisorderModel,
    pub seed: u64,
    /// Refuse to run if the pattern count times the per-pattern samples
    /// exceeds this.
    pub max_evaluations: u128,
    pub single_thread: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_added_particles: 5,
            evaluation_mode: TargetMode::SinkFinal,
            disorder_samples: 0,
            disorder: DisorderModel::None,
            seed: 0,
            max_evaluations: 1_000_000,
            single_thread: false,
        }
    }
}

impl SearchBudget {
    pub fn deterministic(max_added_particles: usize, mode: TargetMode) -> Self {
        SearchBudget {
            max_added_particles,
            evaluation_mode: mode,
            ..Default::default()
        }
    }
}

/// A scored pattern. Deterministic scores have `stderr = 0`, `samples = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternScore {
    pub pattern: Pattern,
    pub particles: usize,
    pub transfer: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Number of patterns evaluated.
    pub patterns: usize,
    /// Dynamics evaluations performed (patterns × samples).
    pub evaluations: u128,
    /// Sorted by transfer (descending), then fewer particles, then pattern.
    pub ranked: Vec<PatternScore>,
}

impl SearchReport {
    pub fn best(&self) -> &PatternScore {
        &self.ranked[0]
    }
}

fn mode_config(config: &PhysicalConfig, mode: TargetMode) -> PhysicalConfig {
    config.clone().with_mode(mode)
}

/// Monte-Carlo (or deterministic, for `samples == 0`) score of one pattern.
/// Sample `s` uses the offsets drawn from `derive_seed(seed, s)` for every
/// pattern, so different patterns see common random numbers.
pub fn score_pattern(
    pattern: &Pattern,
    config: &PhysicalConfig,
    disorder: &DisorderModel,
    samples: usize,
    seed: u64,
) -> Result<PatternScore> {
    let values = if samples == 0 || disorder.is_none() {
        let g = ChainGeometry::from_pattern(pattern, config)?;
        vec![transfer_value(&g, config, Backend::Amplitude)?]
    } else {
        (0..samples)
            .map(|s| {
                let mut rng = rng_from_seed(derive_seed(seed, s as u64));
                let g = realize_configuration(pattern, config, disorder, &mut rng)?;
                transfer_value(&g, config, Backend::Amplitude)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let stats = SampleStats::from_values(&values);
    Ok(PatternScore {
        pattern: pattern.clone(),
        particles: pattern.particle_count(),
        transfer: stats.mean,
        stderr: stats.stderr,
        samples: stats.samples,
    })
}

fn rank(scores: &mut [PatternScore]) {
    scores.sort_by(|a, b| {
        b.transfer
            .total_cmp(&a.transfer)
            .then(a.particles.cmp(&b.particles))
            .then_with(|| a.pattern.to_string().cmp(&b.pattern.to_string()))
    });
}

/// Evaluates every pattern with at most `max_added_particles` interior cells.
pub fn brute_force(config: &PhysicalConfig, budget: &SearchBudget) -> Result<SearchReport> {
    config.validate()?;
    budget.disorder.validate()?;
    let config = mode_config(config, budget.evaluation_mode);
    let interior = config.n_cells - 2;
    let k_max = budget.max_added_particles.min(interior);
    let patterns = subset_count(interior, k_max);
    let samples = if budget.disorder.is_none() {
        1
    } else {
        budget.disorder_samples.max(1)
    };
    let evaluations = patterns.saturating_mul(samples as u128);
    if evaluations > budget.max_evaluations {
        return Err(Error::BudgetExceeded {
            count: evaluations,
            cap: budget.max_evaluations,
        });
    }
    let all: Vec<Pattern> = Subsets::new(interior, k_max)
        .map(|cells| {
            let interior_cells: Vec<usize> = cells.iter().map(|c| c + 1).collect();
            Pattern::with_interior(config.n_cells, &interior_cells)
        })
        .collect::<Result<_>>()?;
    debug_assert_eq!(all.len() as u128, patterns);
    let mc_samples = if budget.disorder.is_none() { 0 } else { samples };
    let mut ranked = map_indexed(all.len(), budget.single_thread, |i| {
        score_pattern(&all[i], &config, &budget.disorder, mc_samples, budget.seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    rank(&mut ranked);
    Ok(SearchReport {
        patterns: all.len(),
        evaluations,
        ranked,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyResult {
    pub pattern: Pattern,
    pub transfer: f64,
    /// Candidate count considered at each greedy step.
    pub candidates_per_step: Vec<usize>,
    /// Cell chosen at each step.
    pub picks: Vec<usize>,
}

/// Adds, one at a time, the cell with the largest transfer gain until no
/// cell improves the chain or the budget is spent. Ties go to the lower index.
pub fn greedy_build(config: &PhysicalConfig, budget: &SearchBudget) -> Result<GreedyResult> {
    config.validate()?;
    let config = mode_config(config, budget.evaluation_mode);
    let mc_samples = if budget.disorder.is_none() {
        0
    } else {
        budget.disorder_samples.max(1)
    };
    let score = |p: &Pattern| score_pattern(p, &config, &budget.disorder, mc_samples, budget.seed).map(|s| s.transfer);

    let mut pattern = Pattern::endpoints(config.n_cells);
    let mut current = score(&pattern)?;
    let mut candidates_per_step = Vec::new();
    let mut picks = Vec::new();
    for _ in 0..budget.max_added_particles {
        let candidates: Vec<usize> = (1..config.n_cells - 1).filter(|&c| !pattern.is_occupied(c)).collect();
        if candidates.is_empty() {
            break;
        }
        candidates_per_step.push(candidates.len());
        let scores = map_indexed(candidates.len(), budget.single_thread, |i| {
            let mut p = pattern.clone();
            p.set(candidates[i]);
            score(&p)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        if scores[best] <= current {
            break;
        }
        pattern.set(candidates[best]);
        picks.push(candidates[best]);
        current = scores[best];
    }
    Ok(GreedyResult {
        pattern,
        transfer: current,
        candidates_per_step,
        picks,
    })
}

/// All cells occupied; deterministic value for `samples == 0` or no disorder.
pub fn filled_baseline(
    config: &PhysicalConfig,
    mode: TargetMode,
    disorder: &DisorderModel,
    samples: usize,
    seed: u64,
    single_thread: bool,
) -> Result<SampleStats> {
    config.validate()?;
    disorder.validate()?;
    let config = mode_config(config, mode);
    let pattern = Pattern::filled(config.n_cells);
    evaluate_samples(&pattern, &config, disorder, samples, seed, single_thread)
}

/// Transfer statistics of a fixed pattern over `samples` disorder
/// realisations (a single deterministic value without disorder).
pub fn evaluate_samples(
    pattern: &Pattern,
    config: &PhysicalConfig,
    disorder: &DisorderModel,
    samples: usize,
    seed: u64,
    single_thread: bool,
) -> Result<SampleStats> {
    if disorder.is_none() || samples == 0 {
        let g = ChainGeometry::from_pattern(pattern, config)?;
        return Ok(SampleStats::from_values(&[transfer_value(
            &g,
            config,
            Backend::Amplitude,
        )?]));
    }
    let values = map_indexed(samples, single_thread, |s| {
        let mut rng = rng_from_seed(derive_seed(seed, s as u64));
        let g = realize_configuration(pattern, config, disorder, &mut rng)?;
        transfer_value(&g, config, Backend::Amplitude)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SampleStats::from_values(&values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strong11() -> PhysicalConfig {
        PhysicalConfig::default().with_cells(11).with_coupling(1.0)
    }

    #[test]
    fn single_addition_picks_midpoint() {
        let r = brute_force(&strong11(), &SearchBudget::deterministic(1, TargetMode::SinkFinal)).unwrap();
        assert_eq!(r.patterns, 10);
        assert_eq!(r.best().pattern.to_string(), "10000100001");
        assert!(r.best().transfer > 0.99);
    }

    #[test]
    fn zero_additions_is_baseline() {
        let r = brute_force(
            &PhysicalConfig::default(),
            &SearchBudget::deterministic(0, TargetMode::SinkFinal),
        )
        .unwrap();
        assert_eq!(r.ranked.len(), 1);
        assert!((r.best().transfer - 0.005).abs() < 1e-3);
    }

    #[test]
    fn exhaustive_count() {
        let c = PhysicalConfig::default().with_cells(9);
        let r = brute_force(&c, &SearchBudget::deterministic(3, TargetMode::SinkFinal)).unwrap();
        assert_eq!(r.patterns, 1 + 7 + 21 + 35);
        let mut seen: Vec<String> = r.ranked.iter().map(|s| s.pattern.to_string()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), r.patterns);
    }

    #[test]
    fn budget_refusal_reports_count() {
        let budget = SearchBudget {
            max_added_particles: 5,
            max_evaluations: 1000,
            ..Default::default()
        };
        match brute_force(&PhysicalConfig::default(), &budget) {
            Err(Error::BudgetExceeded { count, cap }) => {
                assert_eq!(count, 16_664);
                assert_eq!(cap, 1000);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn ranking_breaks_ties_by_particle_count() {
        let mk = |s: &str, t: f64| PatternScore {
            pattern: s.parse().unwrap(),
            particles: s.parse::<Pattern>().unwrap().particle_count(),
            transfer: t,
            stderr: 0.0,
            samples: 1,
        };
        let mut v = vec![mk("1111", 0.5), mk("1011", 0.5), mk("1101", 0.5), mk("1001", 0.7)];
        rank(&mut v);
        let order: Vec<String> = v.iter().map(|s| s.pattern.to_string()).collect();
        assert_eq!(order, ["1001", "1011", "1101", "1111"]);
    }

    #[test]
    fn greedy_first_pick_is_midpoint_and_dominated() {
        let c = strong11();
        let budget = SearchBudget::deterministic(3, TargetMode::SinkFinal);
        let g = greedy_build(&c, &budget).unwrap();
        assert_eq!(g.picks[0], 5);
        assert_eq!(g.candidates_per_step[0], 9);
        let b = brute_force(&c, &budget).unwrap();
        assert!(b.best().transfer >= g.transfer);
    }

    #[test]
    fn filled_deterministic_matches_direct_evaluation() {
        let c = PhysicalConfig::default().with_cells(11);
        let stats = filled_baseline(&c, TargetMode::SinkFinal, &DisorderModel::None, 0, 0, true).unwrap();
        let g = ChainGeometry::from_pattern(&Pattern::filled(11), &c).unwrap();
        let direct = crate::lindblad::evaluate_transfer(&g, &c).unwrap().target_value();
        assert!((stats.mean - direct).abs() < 1e-10);
        assert_eq!(stats.samples, 1);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_threading_independent() {
        let c = PhysicalConfig::default();
        let p: Pattern = "100010001000100010001".parse().unwrap();
        let d = DisorderModel::Uniform { r: 0.5 };
        let a = evaluate_samples(&p, &c, &d, 64, 11, true).unwrap();
        let b = evaluate_samples(&p, &c, &d, 64, 11, false).unwrap();
        assert_eq!(a, b);
        let s = score_pattern(&p, &c, &d, 64, 11).unwrap();
        assert_eq!(s.transfer, a.mean);
    }
}
