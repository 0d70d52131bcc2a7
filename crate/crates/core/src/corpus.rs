//! Built-in diagrams and Reidemeister equivalence classes.

use crate::diagram::{apply_move, parse_pd, r3_sites, Diagram, MoveKind, MoveSpec};
use crate::error::Result;

pub const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
pub const FIGURE_EIGHT: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
pub const HOPF: &str = "X[1,3,2,4] X[3,1,4,2]";
pub const FIVE_TWO: &str = "X[1,5,2,4] X[3,9,4,8] X[5,1,6,10] X[7,3,8,2] X[9,7,10,6]";

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub diagram: Diagram,
}

#[derive(Clone, Debug)]
pub struct EquivalenceClass {
    pub name: &'static str,
    pub members: Vec<Entry>,
}

fn entry(name: impl Into<String>, diagram: Diagram) -> Entry {
    Entry { name: name.into(), diagram }
}

fn pd(code: &str) -> Diagram {
    parse_pd(code).expect("built-in code parses")
}

fn moved(base: &Entry, m: MoveSpec) -> Result<Entry> {
    let d = apply_move(&base.diagram, &m)?;
    Ok(entry(format!("{} {m}", base.name), d))
}

/// Two distinct arcs on the first face that has them.
fn r2_site(d: &Diagram) -> Vec<u32> {
    d.faces()
        .iter()
        .find_map(|f| {
            let a = d.label(f[0]);
            f.iter().map(|&s| d.label(s)).find(|&b| b != a).map(|b| vec![a, b])
        })
        .expect("diagram has a face with two arcs")
}

fn first_arc(d: &Diagram) -> u32 {
    d.arcs().next().expect("diagram has an arc")
}

/// Unknot in 0 to 3 crossings, trefoil with added kink and bigon, and the
/// figure-eight before and after an R3 move.
pub fn equivalence_classes() -> Result<Vec<EquivalenceClass>> {
    let unknot = entry("unknot", Diagram::unknot());
    let kink_pos = entry("unknot-kink+", pd("X[1,1,2,2]"));
    let kink_neg = entry("unknot-kink-", pd("X[1,2,2,1]"));
    let a = first_arc(&kink_pos.diagram);
    let two_kinks = moved(&kink_pos, MoveSpec::new(MoveKind::R1Plus, vec![a], false))?;
    let kink_bigon = moved(&kink_neg, MoveSpec::new(MoveKind::R2Plus, r2_site(&kink_neg.diagram), true))?;

    let trefoil = entry("trefoil", pd(TREFOIL));
    let t = &trefoil.diagram;
    let trefoil_kink = moved(&trefoil, MoveSpec::new(MoveKind::R1Plus, vec![first_arc(t)], true))?;
    let trefoil_bigon = moved(&trefoil, MoveSpec::new(MoveKind::R2Plus, r2_site(t), true))?;

    let fig8 = entry("figure-eight", pd(FIGURE_EIGHT));
    let fig8_bigon = moved(&fig8, MoveSpec::new(MoveKind::R2Plus, r2_site(&fig8.diagram), true))?;
    let site = *r3_sites(&fig8_bigon.diagram).first().expect("bigon creates an R3 site");
    let fig8_r3 = moved(&fig8_bigon, MoveSpec::new(MoveKind::R3, site.to_vec(), false))?;

    Ok(vec![
        EquivalenceClass { name: "unknot", members: vec![unknot, kink_pos, kink_neg, two_kinks, kink_bigon] },
        EquivalenceClass { name: "trefoil", members: vec![trefoil, trefoil_kink, trefoil_bigon] },
        EquivalenceClass { name: "figure-eight", members: vec![fig8, fig8_bigon, fig8_r3] },
    ])
}

/// Every built-in diagram: the class members plus the Hopf link, the mirror
/// trefoil and 5_2.
pub fn diagrams() -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = equivalence_classes()?.into_iter().flat_map(|c| c.members).collect();
    out.push(entry("hopf", pd(HOPF)));
    out.push(entry("trefoil-mirror", pd(TREFOIL).mirror()));
    out.push(entry("5_2", pd(FIVE_TWO)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_build() {
        let classes = equivalence_classes().unwrap();
        let counts: Vec<Vec<usize>> =
            classes.iter().map(|c| c.members.iter().map(|e| e.diagram.crossing_count()).collect()).collect();
        assert_eq!(counts, vec![vec![0, 1, 1, 2, 3], vec![3, 4, 5], vec![4, 6, 6]]);
        let f = &classes[2].members;
        assert_ne!(f[1].diagram, f[2].diagram);
        for c in &classes {
            for e in &c.members {
                assert_eq!(e.diagram.component_count(), 1, "{}", e.name);
            }
        }
    }

    #[test]
    fn corpus_is_small() {
        let all = diagrams().unwrap();
        assert_eq!(all.len(), 14);
        assert!(all.iter().all(|e| e.diagram.crossing_count() <= 8));
    }
}
