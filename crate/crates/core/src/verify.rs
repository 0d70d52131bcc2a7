//! Verification suites run over the built-in corpus. Each suite yields named
//! pass/fail checks; a check that errors counts as failed.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::algebra::RingParams;
use crate::complex::{build_unreduced, build_unreduced_with, BigradedComplex};
use crate::corpus::{diagrams, equivalence_classes, Entry};
use crate::cube::{resolve, ArrowConvention};
use crate::diagram::Diagram;
use crate::error::Result;
use crate::homology::{homology, HomologyGroup, HomologyTable};
use crate::oracle::{complex_euler_characteristic, euler_characteristic, jones, LaurentPoly};
use crate::reduced::{build_reduced, build_reduced_with, check_commuting_square, check_cycle_relation, check_graph_span, sample_cycles};

/// Presets exercised by the `d2` suite.
pub const D2_PRESETS: [RingParams; 4] = [
    RingParams { x: 1, y: 1, z: 1 },
    RingParams { x: 1, y: -1, z: 1 },
    RingParams { x: -1, y: 1, z: 1 },
    RingParams { x: -1, y: -1, z: -1 },
];

/// Largest crossing number for the graph-span suite.
pub const GRAPH_SPAN_MAX_CROSSINGS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    D2,
    Euler,
    CommutingSquare,
    GraphSpan,
    RmInvariance,
    ArrowFlip,
    Unknot,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::D2,
        Suite::Euler,
        Suite::CommutingSquare,
        Suite::GraphSpan,
        Suite::RmInvariance,
        Suite::ArrowFlip,
        Suite::Unknot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::D2 => "d2",
            Suite::Euler => "euler",
            Suite::CommutingSquare => "commuting-square",
            Suite::GraphSpan => "graph-span",
            Suite::RmInvariance => "rm-invariance",
            Suite::ArrowFlip => "arrow-flip",
            Suite::Unknot => "unknot",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Also check the arrow complex wherever a suite covers both theories.
    pub reduced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.suite, self.name)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn count(&self) -> (usize, usize) {
        let pass = self.checks.iter().filter(|c| c.passed).count();
        (pass, self.checks.len() - pass)
    }
}

fn check(suite: Suite, name: impl Into<String>, outcome: Result<(bool, String)>) -> Check {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    Check { suite, name: name.into(), passed, detail }
}

fn table_summary(t: &HomologyTable) -> String {
    t.groups
        .iter()
        .map(|g| {
            let tors: String = g.torsion.iter().map(|k| format!("+Z/{k}")).collect();
            format!("({},{}):{}{tors}", g.h, g.q, g.betti)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn same_table(a: &HomologyTable, b: &HomologyTable) -> (bool, String) {
    if a == b {
        (true, String::new())
    } else {
        (false, format!("{} vs {}", table_summary(a), table_summary(b)))
    }
}

fn d_squared(c: Result<BigradedComplex>) -> Result<(bool, String)> {
    let c = c?;
    c.check_d_squared()?;
    c.check_grading()?;
    Ok((true, format!("rank {}", c.rank())))
}

fn suite_d2(entries: &[Entry], opts: Options) -> Vec<Check> {
    entries
        .par_iter()
        .flat_map_iter(|e| {
            let mut out: Vec<Check> = D2_PRESETS
                .iter()
                .map(|&p| check(Suite::D2, format!("{} at {p}", e.name), d_squared(build_unreduced(&e.diagram, p))))
                .collect();
            if opts.reduced {
                out.push(check(Suite::D2, format!("{} reduced", e.name), d_squared(build_reduced(&e.diagram))));
            }
            out
        })
        .collect()
}

fn suite_euler(entries: &[Entry], opts: Options) -> Vec<Check> {
    entries
        .par_iter()
        .flat_map_iter(|e| {
            let d = &e.diagram;
            let unreduced = build_unreduced(d, RingParams::EVEN);
            let mut out = vec![check(
                Suite::Euler,
                format!("{} unreduced", e.name),
                (|| {
                    let c = unreduced.as_ref().map_err(Clone::clone)?;
                    let j = jones(d)?;
                    let chi = complex_euler_characteristic(c);
                    let from_homology = euler_characteristic(&homology(c)?);
                    Ok((chi == j && from_homology == j, format!("chi = {chi}, jones = {j}")))
                })(),
            )];
            if opts.reduced {
                out.push(check(
                    Suite::Euler,
                    format!("{} reduced", e.name),
                    (|| {
                        let full = complex_euler_characteristic(unreduced.as_ref().map_err(Clone::clone)?);
                        let chi = complex_euler_characteristic(&build_reduced(d)?);
                        let lifted = &chi * &LaurentPoly::quantum_two();
                        Ok((lifted == full, format!("(q + q^-1) * ({chi}) vs {full}")))
                    })(),
                ));
            }
            out
        })
        .collect()
}

fn suite_commuting_square(entries: &[Entry]) -> Vec<Check> {
    entries
        .par_iter()
        .map(|e| {
            check(
                Suite::CommutingSquare,
                e.name.clone(),
                check_commuting_square(&e.diagram).map(|r| {
                    (r.passed(), format!("{} edges, {} basis elements, {} violations", r.edges, r.elements, r.violations.len()))
                }),
            )
        })
        .collect()
}

fn graph_span(d: &Diagram) -> Result<(bool, String)> {
    let n = d.crossing_count();
    let reports = (0..1u32 << n)
        .into_par_iter()
        .map(|s| check_graph_span(&resolve(d, s, ArrowConvention::Normal)))
        .collect::<Result<Vec<_>>>()?;
    let equal = reports.iter().filter(|r| r.equal).count();
    let mut detail = format!("{equal}/{} states equal", reports.len());
    if let Some(r) = reports.iter().find(|r| !r.equal) {
        detail += &format!(
            "; state {:#b}: span rank {}, lattice rank {}, kernel rank {}, lattice in span {}, span in lattice {}",
            r.state, r.span_rank, r.lattice_rank, r.kernel_rank, r.lattice_in_span, r.span_in_lattice
        );
    }
    Ok((equal == reports.len(), detail))
}

fn suite_graph_span(entries: &[Entry]) -> Vec<Check> {
    let mut out: Vec<Check> = entries
        .par_iter()
        .filter(|e| e.diagram.crossing_count() <= GRAPH_SPAN_MAX_CROSSINGS)
        .map(|e| check(Suite::GraphSpan, e.name.clone(), graph_span(&e.diagram)))
        .collect();
    let cycles = sample_cycles();
    out.push(check(
        Suite::GraphSpan,
        "cycle relations",
        (|| {
            let mut held = 0;
            for c in &cycles {
                held += check_cycle_relation(c)? as usize;
            }
            Ok((held == cycles.len(), format!("{held}/{} cycles", cycles.len())))
        })(),
    ));
    out
}

fn suite_rm_invariance(opts: Options) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for class in equivalence_classes()? {
        let (base, rest) = class.members.split_first().expect("classes are nonempty");
        for p in [RingParams::EVEN, RingParams::ODD] {
            let reference = homology(&build_unreduced(&base.diagram, p)?)?;
            out.extend(rest.par_iter().map(|m| {
                check(
                    Suite::RmInvariance,
                    format!("{} ~ {} at {p}", base.name, m.name),
                    build_unreduced(&m.diagram, p).and_then(|c| homology(&c)).map(|t| same_table(&reference, &t)),
                )
            }).collect::<Vec<_>>());
        }
        if opts.reduced {
            let reference = homology(&build_reduced(&base.diagram)?)?;
            out.extend(rest.par_iter().map(|m| {
                check(
                    Suite::RmInvariance,
                    format!("{} ~ {} reduced", base.name, m.name),
                    build_reduced(&m.diagram).and_then(|c| homology(&c)).map(|t| same_table(&reference, &t)),
                )
            }).collect::<Vec<_>>());
        }
    }
    Ok(out)
}

fn flip_pair(d: &Diagram, build: impl Fn(&Diagram, ArrowConvention) -> Result<BigradedComplex>) -> Result<(bool, String)> {
    let a = homology(&build(d, ArrowConvention::Normal)?)?;
    let b = homology(&build(d, ArrowConvention::Flipped)?)?;
    Ok(same_table(&a, &b))
}

fn suite_arrow_flip(entries: &[Entry], opts: Options) -> Vec<Check> {
    entries
        .par_iter()
        .flat_map_iter(|e| {
            let mut out: Vec<Check> = [RingParams::EVEN, RingParams::ODD]
                .into_iter()
                .map(|p| {
                    check(
                        Suite::ArrowFlip,
                        format!("{} at {p}", e.name),
                        flip_pair(&e.diagram, |d, c| build_unreduced_with(d, p, c)),
                    )
                })
                .collect();
            if opts.reduced {
                out.push(check(Suite::ArrowFlip, format!("{} reduced", e.name), flip_pair(&e.diagram, build_reduced_with)));
            }
            out
        })
        .collect()
}

fn z_at(cells: &[(i32, i32)]) -> HomologyTable {
    HomologyTable::from_groups(cells.iter().map(|&(h, q)| HomologyGroup { h, q, betti: 1, torsion: vec![] }).collect())
}

fn suite_unknot(opts: Options) -> Vec<Check> {
    let u = Diagram::unknot();
    let mut out = vec![check(
        Suite::Unknot,
        "unreduced",
        build_unreduced(&u, RingParams::EVEN).and_then(|c| homology(&c)).map(|t| same_table(&z_at(&[(0, -1), (0, 1)]), &t)),
    )];
    if opts.reduced {
        out.push(check(
            Suite::Unknot,
            "reduced",
            build_reduced(&u).and_then(|c| homology(&c)).map(|t| same_table(&z_at(&[(0, 0)]), &t)),
        ));
    }
    out
}

/// Runs one suite over the built-in corpus.
pub fn run(suite: Suite, opts: Options) -> Result<Report> {
    let entries = diagrams()?;
    let checks = match suite {
        Suite::D2 => suite_d2(&entries, opts),
        Suite::Euler => suite_euler(&entries, opts),
        Suite::CommutingSquare => suite_commuting_square(&entries),
        Suite::GraphSpan => suite_graph_span(&entries),
        Suite::RmInvariance => suite_rm_invariance(opts)?,
        Suite::ArrowFlip => suite_arrow_flip(&entries, opts),
        Suite::Unknot => suite_unknot(opts),
    };
    Ok(Report { checks })
}

pub fn run_all(opts: Options) -> Result<Report> {
    let mut report = Report::default();
    for s in Suite::ALL {
        report.checks.extend(run(s, opts)?.checks);
    }
    Ok(report)
}
