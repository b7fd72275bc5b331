//! Named verification suites over the exact supertrace machinery, and the
//! report format the command-line driver emits.

use std::time::Instant;

use rayon::prelude::*;

use supertrace_core::error::{CoreError, Result};
use supertrace_core::geometry::jetio;
use supertrace_core::geometry::MetricDilatonJet;
use supertrace_core::heatcoeff::{coefficient_for_bundle, product_check, supertrace};
use supertrace_core::invariants::{
    even_divergence_density, lemma_identities, odd_divergence_density, pfaffian_density,
};
use supertrace_core::jet::PolyJet;
use supertrace_core::rational::{display_ratio, int, rat, Rational};

/// The named verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Thm11Vanishing,
    Thm11Pfaffian,
    Thm11Odd,
    Thm12,
    Lemma23Product,
    Lemma31Kernel,
    Lemma34Identities,
    EulerSphere,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Thm11Vanishing,
        Suite::Thm11Pfaffian,
        Suite::Thm11Odd,
        Suite::Thm12,
        Suite::Lemma23Product,
        Suite::Lemma31Kernel,
        Suite::Lemma34Identities,
        Suite::EulerSphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Thm11Vanishing => "thm1-1-vanishing",
            Suite::Thm11Pfaffian => "thm1-1-pfaffian",
            Suite::Thm11Odd => "thm1-1-odd",
            Suite::Thm12 => "thm1-2",
            Suite::Lemma23Product => "lemma2-3-product",
            Suite::Lemma31Kernel => "lemma3-1-kernel",
            Suite::Lemma34Identities => "lemma3-4-identities",
            Suite::EulerSphere => "euler-sphere",
        }
    }

    pub fn parse(name: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| CoreError::UnknownName(name.to_string()))
    }

    pub fn default_dims(self) -> Vec<usize> {
        match self {
            Suite::Thm11Vanishing => vec![1, 2, 3, 4],
            Suite::Thm11Pfaffian => vec![2, 4],
            Suite::Thm11Odd => vec![1, 3],
            Suite::Thm12 => vec![2, 4],
            Suite::Lemma23Product => vec![2, 3],
            Suite::Lemma31Kernel => vec![2, 4],
            Suite::Lemma34Identities => vec![2, 4],
            Suite::EulerSphere => vec![2, 4],
        }
    }
}

/// Suite parameters. `degree` overrides the per-case default truncation.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub trials: u32,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub degree: Option<u32>,
}

impl SuiteConfig {
    pub fn new(suite: Suite, trials: u32, seed: u64, dims: Option<Vec<usize>>) -> Self {
        SuiteConfig {
            trials,
            seed,
            dims: dims.unwrap_or_else(|| suite.default_dims()),
            degree: None,
        }
    }
}

/// One verification record: an exact left and right hand side.
#[derive(Clone, Debug)]
pub struct CaseRecord {
    pub id: String,
    pub seed: u64,
    pub dim: usize,
    pub n: u32,
    pub lhs: Rational,
    pub rhs: Rational,
    pub elapsed_ms: u128,
}

impl CaseRecord {
    pub fn equal(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub suite: String,
    pub params: String,
    pub cases: Vec<CaseRecord>,
}

impl VerificationReport {
    pub fn overall_pass(&self) -> bool {
        self.cases.iter().all(|c| c.equal())
    }

    /// Line-delimited report: one record per case plus a summary record.
    /// Timings are the only nondeterministic field and can be masked.
    pub fn render(&self, include_timings: bool) -> String {
        let mut out = String::new();
        out.push_str(&format!("# suite={} {}\n", self.suite, self.params));
        for c in &self.cases {
            let ms = if include_timings {
                c.elapsed_ms.to_string()
            } else {
                "-".to_string()
            };
            out.push_str(&format!(
                "case id={} seed={} dim={} n={} lhs={} rhs={} equal={} ms={}\n",
                c.id,
                c.seed,
                c.dim,
                c.n,
                display_ratio(&c.lhs),
                display_ratio(&c.rhs),
                c.equal(),
                ms
            ));
        }
        let passed = self.cases.iter().filter(|c| c.equal()).count();
        out.push_str(&format!(
            "summary suite={} cases={} passed={} overall={}\n",
            self.suite,
            self.cases.len(),
            passed,
            if self.overall_pass() { "pass" } else { "fail" }
        ));
        out
    }
}

type CaseFn = Box<dyn Fn() -> Result<(Rational, Rational)> + Send + Sync>;

struct PlannedCase {
    id: String,
    seed: u64,
    dim: usize,
    n: u32,
    run: CaseFn,
}

/// Random-jet density: full in low dimension, thinned in dimension four to
/// keep the order-six pipelines inside their runtime budget.
pub fn density_for(dim: usize) -> u32 {
    if dim >= 4 {
        35
    } else {
        100
    }
}

fn random_jet(dim: usize, degree: u32, seed: u64) -> MetricDilatonJet {
    MetricDilatonJet::random_with_density(dim, degree, seed, density_for(dim))
}

fn dilaton_circle(degree: u32, seed: u64) -> MetricDilatonJet {
    let phi = MetricDilatonJet::random(1, degree, seed).phi().clone();
    MetricDilatonJet::circle_with_dilaton(degree, phi)
}

fn plan(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<PlannedCase>> {
    let mut cases: Vec<PlannedCase> = Vec::new();
    let degree_or = |d: u32| cfg.degree.unwrap_or(d);
    match suite {
        Suite::Thm11Vanishing => {
            let pairs: [(u32, usize); 5] = [(0, 1), (0, 2), (2, 3), (0, 4), (2, 4)];
            for (n, m) in pairs {
                if !cfg.dims.contains(&m) {
                    continue;
                }
                for t in 0..cfg.trials {
                    let seed = cfg.seed + 1000 * t as u64 + m as u64;
                    let degree = degree_or(n.max(2));
                    cases.push(PlannedCase {
                        id: format!("{}/n{}m{}/t{:02}", suite.name(), n, m, t),
                        seed,
                        dim: m,
                        n,
                        run: Box::new(move || {
                            let jet = random_jet(m, degree, seed);
                            Ok((supertrace(n, &jet)?.value, Rational::from_integer(0.into())))
                        }),
                    });
                }
            }
        }
        Suite::Thm11Pfaffian => {
            for &m in cfg.dims.iter().filter(|&&m| m % 2 == 0) {
                let n = m as u32;
                for t in 0..cfg.trials {
                    let seed = cfg.seed + 1000 * t as u64 + m as u64;
                    let degree = degree_or(n.max(2));
                    cases.push(PlannedCase {
                        id: format!("{}/m{}/t{:02}", suite.name(), m, t),
                        seed,
                        dim: m,
                        n,
                        run: Box::new(move || {
                            let jet = random_jet(m, degree, seed);
                            Ok((supertrace(n, &jet)?.value, pfaffian_density(&jet)?.value))
                        }),
                    });
                }
                // round-sphere fixture: the density is constant and equals
                // 2 in dimension two, 12 in dimension four
                let expect = if m == 2 { int(2) } else { int(12) };
                let expect2 = expect.clone();
                cases.push(PlannedCase {
                    id: format!("{}/m{}/sphere-supertrace", suite.name(), m),
                    seed: 0,
                    dim: m,
                    n,
                    run: Box::new(move || {
                        let jet = MetricDilatonJet::unit_sphere(m, n.max(2));
                        Ok((supertrace(n, &jet)?.value, expect.clone()))
                    }),
                });
                cases.push(PlannedCase {
                    id: format!("{}/m{}/sphere-pfaffian", suite.name(), m),
                    seed: 0,
                    dim: m,
                    n,
                    run: Box::new(move || {
                        let jet = MetricDilatonJet::unit_sphere(m, n.max(2));
                        Ok((pfaffian_density(&jet)?.value, expect2.clone()))
                    }),
                });
            }
        }
        Suite::Thm11Odd => {
            for &m in cfg.dims.iter().filter(|&&m| m % 2 == 1) {
                let n = m as u32 + 1;
                for t in 0..cfg.trials {
                    let seed = cfg.seed + 1000 * t as u64 + m as u64;
                    let degree = degree_or(n);
                    cases.push(PlannedCase {
                        id: format!("{}/m{}/t{:02}", suite.name(), m, t),
                        seed,
                        dim: m,
                        n,
                        run: Box::new(move || {
                            let jet = random_jet(m, degree, seed);
                            Ok((
                                supertrace(n, &jet)?.value,
                                odd_divergence_density(&jet)?.value,
                            ))
                        }),
                    });
                }
            }
        }
        Suite::Thm12 => {
            for &m in cfg.dims.iter().filter(|&&m| m % 2 == 0) {
                let n = m as u32 + 2;
                for t in 0..cfg.trials {
                    let seed = cfg.seed + 1000 * t as u64 + m as u64;
                    let degree = degree_or(n);
                    cases.push(PlannedCase {
                        id: format!("{}/m{}/t{:02}", suite.name(), m, t),
                        seed,
                        dim: m,
                        n,
                        run: Box::new(move || {
                            let jet = random_jet(m, degree, seed);
                            Ok((
                                supertrace(n, &jet)?.value,
                                even_divergence_density(&jet)?.value,
                            ))
                        }),
                    });
                }
            }
        }
        Suite::Lemma23Product => {
            for t in 0..cfg.trials {
                let seed = cfg.seed + 1000 * t as u64;
                // two dilaton circles
                cases.push(PlannedCase {
                    id: format!("{}/circles/t{:02}", suite.name(), t),
                    seed,
                    dim: 2,
                    n: 4,
                    run: Box::new(move || {
                        let a = dilaton_circle(6, seed);
                        let b = dilaton_circle(6, seed + 7);
                        let c = product_check(&a, &b, 4)?;
                        Ok((c.lhs, c.rhs))
                    }),
                });
                // random line times dilaton circle
                cases.push(PlannedCase {
                    id: format!("{}/line-circle/t{:02}", suite.name(), t),
                    seed,
                    dim: 2,
                    n: 4,
                    run: Box::new(move || {
                        let a = random_jet(1, 6, seed + 13);
                        let b = dilaton_circle(6, seed + 17);
                        let c = product_check(&a, &b, 4)?;
                        Ok((c.lhs, c.rhs))
                    }),
                });
                // random surface times flat circle: a circle extension
                cases.push(PlannedCase {
                    id: format!("{}/surface-ext/t{:02}", suite.name(), t),
                    seed,
                    dim: 3,
                    n: 4,
                    run: Box::new(move || {
                        let a = random_jet(2, 6, seed + 19);
                        let b = MetricDilatonJet::flat(1, 6);
                        let c = product_check(&a, &b, 4)?;
                        Ok((c.lhs, c.rhs))
                    }),
                });
                // random surface times dilaton circle
                cases.push(PlannedCase {
                    id: format!("{}/surface-circle/t{:02}", suite.name(), t),
                    seed,
                    dim: 3,
                    n: 4,
                    run: Box::new(move || {
                        let a = random_jet(2, 6, seed + 23);
                        let b = dilaton_circle(6, seed + 29);
                        let c = product_check(&a, &b, 4)?;
                        Ok((c.lhs, c.rhs))
                    }),
                });
                // random surface times a round sphere
                cases.push(PlannedCase {
                    id: format!("{}/surface-sphere/t{:02}", suite.name(), t),
                    seed,
                    dim: 4,
                    n: 4,
                    run: Box::new(move || {
                        let a = random_jet(2, 4, seed + 31);
                        let b = MetricDilatonJet::unit_sphere(2, 4);
                        let c = product_check(&a, &b, 4)?;
                        Ok((c.lhs, c.rhs))
                    }),
                });
            }
        }
        Suite::Lemma31Kernel => {
            for &m in cfg.dims.iter().filter(|&&m| m % 2 == 0) {
                let n = m as u32 + 2;
                for t in 0..cfg.trials {
                    let seed = cfg.seed + 1000 * t as u64 + m as u64;
                    let degree = degree_or(n.saturating_sub(2).max(4));
                    cases.push(PlannedCase {
                        id: format!("{}/m{}/t{:02}", suite.name(), m, t),
                        seed,
                        dim: m,
                        n,
                        run: Box::new(move || {
                            let base = random_jet(m - 1, degree, seed);
                            let ext = base.extend_by_circle();
                            Ok((
                                even_divergence_density(&ext)?.value,
                                Rational::from_integer(0.into()),
                            ))
                        }),
                    });
                }
            }
        }
        Suite::Lemma34Identities => {
            for &m in cfg.dims.iter().filter(|&&m| m % 2 == 0) {
                for t in 0..cfg.trials {
                    let seed = cfg.seed + 1000 * t as u64 + m as u64;
                    let degree = degree_or(4);
                    cases.push(PlannedCase {
                        id: format!("{}/m{}/t{:02}", suite.name(), m, t),
                        seed,
                        dim: m,
                        n: m as u32 + 1,
                        run: Box::new(move || {
                            let jet = random_jet(m, degree, seed);
                            let residuals = lemma_identities(&jet)?;
                            // residual sum of squares over all identities and
                            // components; exactly zero iff every residual is
                            let mut rss = Rational::from_integer(0.into());
                            for r in residuals {
                                for c in r.components {
                                    rss += &c * &c;
                                }
                            }
                            Ok((rss, Rational::from_integer(0.into())))
                        }),
                    });
                }
            }
        }
        Suite::EulerSphere => {
            // chi = (normalized density) * volume / (4 pi)^{m/2}; the volume
            // ratios are Area(S^2_r)/(4 pi) = r^2 and Vol(S^4_r)/(4 pi)^2 =
            // r^4/6, so everything stays rational.
            let radii2: [Rational; 3] = [int(1), int(4), rat(9, 4)];
            if cfg.dims.contains(&2) {
                for (k, r2) in radii2.iter().enumerate() {
                    let r2 = r2.clone();
                    cases.push(PlannedCase {
                        id: format!("{}/m2/r{}", suite.name(), k),
                        seed: 0,
                        dim: 2,
                        n: 2,
                        run: Box::new(move || {
                            let jet = MetricDilatonJet::sphere(2, 2, r2.clone().recip());
                            let st = supertrace(2, &jet)?.value;
                            Ok((st * &r2, int(2)))
                        }),
                    });
                }
            }
            if cfg.dims.contains(&4) {
                for (k, r2) in radii2.iter().take(2).enumerate() {
                    let r2 = r2.clone();
                    cases.push(PlannedCase {
                        id: format!("{}/m4/r{}", suite.name(), k),
                        seed: 0,
                        dim: 4,
                        n: 4,
                        run: Box::new(move || {
                            let jet = MetricDilatonJet::sphere(4, 4, r2.clone().recip());
                            let st = supertrace(4, &jet)?.value;
                            let vol_ratio = &r2 * &r2 * rat(1, 6);
                            Ok((st * vol_ratio, int(2)))
                        }),
                    });
                }
            }
        }
    }
    Ok(cases)
}

/// Execute a named suite. Cases run on parallel workers; the report keeps
/// the planned order so output is independent of scheduling.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<VerificationReport> {
    let planned = plan(suite, cfg)?;
    let records: Result<Vec<CaseRecord>> = planned
        .par_iter()
        .map(|case| {
            let start = Instant::now();
            let (lhs, rhs) = (case.run)()?;
            Ok(CaseRecord {
                id: case.id.clone(),
                seed: case.seed,
                dim: case.dim,
                n: case.n,
                lhs,
                rhs,
                elapsed_ms: start.elapsed().as_millis(),
            })
        })
        .collect();
    let dims_s = cfg
        .dims
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",");
    Ok(VerificationReport {
        suite: suite.name().to_string(),
        params: format!(
            "trials={} seed={} dims={} degree={}",
            cfg.trials,
            cfg.seed,
            dims_s,
            cfg.degree
                .map(|d| d.to_string())
                .unwrap_or_else(|| "default".into())
        ),
        cases: records?,
    })
}

/// Ad-hoc evaluation targets for the `eval` subcommand.
pub enum EvalTarget {
    Supertrace { n: u32 },
    Coefficient { n: u32, p: usize },
    Invariant { name: String },
}

#[derive(Debug)]
pub struct EvalOutcome {
    pub value: Rational,
    pub description: String,
}

pub fn eval_jet_file(text: &str, target: &EvalTarget, degree: Option<u32>) -> Result<EvalOutcome> {
    let mut jet = jetio::read_jet(text)?;
    if let Some(d) = degree {
        if d > jet.degree() {
            return Err(CoreError::Truncation {
                what: "requested evaluation degree exceeds the stored jet".into(),
                required: d,
                actual: jet.degree(),
            });
        }
        jet = jet.truncated(d);
    }
    match target {
        EvalTarget::Supertrace { n } => {
            let v = supertrace(*n, &jet)?;
            Ok(EvalOutcome {
                value: v.value,
                description: format!("supertrace n={} m={}", v.n, v.m),
            })
        }
        EvalTarget::Coefficient { n, p } => {
            let v = coefficient_for_bundle(&jet, *n, *p)?;
            Ok(EvalOutcome {
                value: v.value,
                description: format!("coefficient n={} p={} m={}", v.n, p, v.m),
            })
        }
        EvalTarget::Invariant { name } => {
            let v = match name.as_str() {
                "pfaffian" => pfaffian_density(&jet)?,
                "odd-divergence" => odd_divergence_density(&jet)?,
                "even-divergence" => even_divergence_density(&jet)?,
                other => return Err(CoreError::UnknownName(other.to_string())),
            };
            Ok(EvalOutcome {
                value: v.value,
                description: format!("invariant {} m={}", v.name, v.m),
            })
        }
    }
}

/// Canonical fixture jets bundled with the binary.
pub fn fixture(name: &str) -> Result<MetricDilatonJet> {
    match name {
        "flat3" => Ok(MetricDilatonJet::flat(3, 4)),
        "circle-dilaton" => {
            // dilaton x^2/2 has unit second derivative at the origin
            let phi = PolyJet::from_terms(1, 6, vec![(vec![2], rat(1, 2))]);
            Ok(MetricDilatonJet::circle_with_dilaton(6, phi))
        }
        "sphere2" => Ok(MetricDilatonJet::unit_sphere(2, 6)),
        "sphere4" => Ok(MetricDilatonJet::unit_sphere(4, 6)),
        other => Err(CoreError::UnknownName(other.to_string())),
    }
}
