//! Oriented link diagrams in planar-diagram (PD) form.
//!
//! A crossing is a 4-tuple of arc labels read counterclockwise starting from
//! the incoming under-strand. Slots `0` and `2` carry the under-strand
//! (in, out), slots `1` and `3` the over-strand; the direction of the
//! over-strand is recovered by tracing components.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub type Arc = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed syntax: {0}")]
    MalformedSyntax(String),
    #[error("arc {arc} occurs {count} time(s), expected exactly 2")]
    ArcCountMismatch { arc: Arc, count: usize },
    #[error("inconsistent diagram: {0}")]
    NonPlanarInconsistency(String),
    #[error("crossing {0} is not visited exactly once over and once under")]
    UnbalancedCode(u32),
    #[error("move site not found: {0}")]
    SiteNotFound(String),
    #[error("local pattern mismatch: {0}")]
    PatternMismatch(String),
}

/// A position on a crossing: crossing index and slot `0..4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub crossing: usize,
    pub pos: usize,
}

impl Slot {
    fn new(crossing: usize, pos: usize) -> Self {
        Slot { crossing, pos: pos % 4 }
    }

    fn rotate(self, by: usize) -> Self {
        Slot::new(self.crossing, self.pos + by)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    crossings: Vec<[Arc; 4]>,
    /// `true` when the over-strand travels from slot 1 to slot 3.
    over_forward: Vec<bool>,
    /// Arcs of each link component in orientation order.
    components: Vec<Vec<Arc>>,
    /// Arrival (head) and departure (tail) slot of every arc.
    heads: BTreeMap<Arc, Slot>,
    tails: BTreeMap<Arc, Slot>,
}

impl Diagram {
    /// The crossingless one-component diagram.
    pub fn unknot() -> Self {
        Diagram {
            crossings: Vec::new(),
            over_forward: Vec::new(),
            components: vec![Vec::new()],
            heads: BTreeMap::new(),
            tails: BTreeMap::new(),
        }
    }

    /// Validates a crossing list: label multiplicities, orientation and
    /// planarity.
    pub fn from_crossings(crossings: Vec<[Arc; 4]>) -> Result<Self, DiagramError> {
        if crossings.is_empty() {
            return Ok(Self::unknot());
        }
        let mut counts: BTreeMap<Arc, usize> = BTreeMap::new();
        for x in &crossings {
            for &a in x {
                *counts.entry(a).or_default() += 1;
            }
        }
        if let Some((&arc, &count)) = counts.iter().find(|(_, &c)| c != 2) {
            return Err(DiagramError::ArcCountMismatch { arc, count });
        }

        let slots = slot_table(&crossings);
        let n = crossings.len();
        let mut over_forward: Vec<Option<bool>> = vec![None; n];
        let mut heads = BTreeMap::new();
        let mut tails = BTreeMap::new();
        let mut components = Vec::new();

        // Start with arcs entering an under-strand, those have a known
        // direction; over-only components fall back to the label order.
        let mut starts: Vec<(Arc, Slot)> = crossings
            .iter()
            .enumerate()
            .map(|(c, x)| (x[0], Slot::new(c, 0)))
            .collect();
        starts.sort();
        let mut visited: BTreeSet<Arc> = BTreeSet::new();
        for (arc, head) in starts {
            if visited.contains(&arc) {
                continue;
            }
            let comp = trace_component(
                &crossings, &slots, arc, head, &mut over_forward, &mut heads, &mut tails,
            )?;
            visited.extend(comp.iter().copied());
            components.push(comp);
        }
        for &arc in counts.keys() {
            if visited.contains(&arc) {
                continue;
            }
            let [s0, s1] = slots[&arc];
            let head = over_only_head(&crossings, arc, s0, s1);
            let comp = trace_component(
                &crossings, &slots, arc, head, &mut over_forward, &mut heads, &mut tails,
            )?;
            visited.extend(comp.iter().copied());
            components.push(comp);
        }

        let d = Diagram {
            over_forward: over_forward.into_iter().map(|f| f.unwrap_or(true)).collect(),
            crossings,
            components,
            heads,
            tails,
        };
        d.check_planar()?;
        Ok(d)
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossings(&self) -> &[[Arc; 4]] {
        &self.crossings
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<Arc>] {
        &self.components
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.heads.keys().copied()
    }

    pub fn arc_count(&self) -> usize {
        self.heads.len().max(1)
    }

    /// Slot where `arc` ends, following the orientation.
    pub fn head(&self, arc: Arc) -> Option<Slot> {
        self.heads.get(&arc).copied()
    }

    /// Slot where `arc` starts, following the orientation.
    pub fn tail(&self, arc: Arc) -> Option<Slot> {
        self.tails.get(&arc).copied()
    }

    pub fn label(&self, s: Slot) -> Arc {
        self.crossings[s.crossing][s.pos]
    }

    /// Whether the over-strand at crossing `c` runs from slot 1 to slot 3.
    pub fn over_forward(&self, c: usize) -> bool {
        self.over_forward[c]
    }

    /// Sign of crossing `c` by the right-hand rule.
    pub fn crossing_sign(&self, c: usize) -> i8 {
        if self.over_forward[c] {
            -1
        } else {
            1
        }
    }

    /// `(n_plus, n_minus)`.
    pub fn crossing_signs(&self) -> (usize, usize) {
        let plus = (0..self.crossing_count())
            .filter(|&c| self.crossing_sign(c) > 0)
            .count();
        (plus, self.crossing_count() - plus)
    }

    pub fn writhe(&self) -> i64 {
        let (p, m) = self.crossing_signs();
        p as i64 - m as i64
    }

    /// Switches every crossing.
    pub fn mirror(&self) -> Diagram {
        let crossings = self
            .crossings
            .iter()
            .zip(&self.over_forward)
            .map(|(&[a, b, c, d], &fwd)| if fwd { [b, c, d, a] } else { [d, a, b, c] })
            .collect();
        Diagram::from_crossings(crossings).expect("mirror of a valid diagram is valid")
    }

    pub fn to_pd(&self) -> String {
        self.crossings
            .iter()
            .map(|x| format!("X[{},{},{},{}]", x[0], x[1], x[2], x[3]))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn slots(&self) -> BTreeMap<Arc, [Slot; 2]> {
        slot_table(&self.crossings)
    }

    fn other_end(&self, slots: &BTreeMap<Arc, [Slot; 2]>, s: Slot) -> Slot {
        let [a, b] = slots[&self.label(s)];
        if a == s {
            b
        } else {
            a
        }
    }

    /// Faces of the diagram as cycles of darts. A dart is the slot at which
    /// a boundary walk (face on the left) arrives; the walk then leaves
    /// through the clockwise-next slot.
    pub fn faces(&self) -> Vec<Vec<Slot>> {
        let slots = self.slots();
        let mut seen = BTreeSet::new();
        let mut faces = Vec::new();
        for c in 0..self.crossing_count() {
            for p in 0..4 {
                let start = Slot::new(c, p);
                if seen.contains(&start) {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = start;
                loop {
                    seen.insert(d);
                    face.push(d);
                    d = self.other_end(&slots, d.rotate(3));
                    if d == start {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        faces
    }

    fn check_planar(&self) -> Result<(), DiagramError> {
        let n = self.crossing_count();
        let slots = self.slots();
        // connected components of the underlying 4-valent graph
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for [a, b] in slots.values() {
            let (ra, rb) = (find(&mut parent, a.crossing), find(&mut parent, b.crossing));
            parent[ra] = rb;
        }
        let pieces = (0..n).filter(|&c| find(&mut parent, c) == c).count();
        let faces = self.faces().len();
        if faces != n + 2 * pieces {
            return Err(DiagramError::NonPlanarInconsistency(format!(
                "diagram does not embed in the sphere ({} crossings, {} faces, expected {})",
                n,
                faces,
                n + 2 * pieces
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd())
    }
}

fn slot_table(crossings: &[[Arc; 4]]) -> BTreeMap<Arc, [Slot; 2]> {
    let mut table: BTreeMap<Arc, Vec<Slot>> = BTreeMap::new();
    for (c, x) in crossings.iter().enumerate() {
        for (p, &a) in x.iter().enumerate() {
            table.entry(a).or_default().push(Slot::new(c, p));
        }
    }
    table
        .into_iter()
        .map(|(a, v)| (a, [v[0], v[1]]))
        .collect()
}

fn other_slot(slots: &BTreeMap<Arc, [Slot; 2]>, arc: Arc, s: Slot) -> Slot {
    let [a, b] = slots[&arc];
    if a == s {
        b
    } else {
        a
    }
}

/// For a component that never passes under, orient the starting arc so that
/// labels increase along it when the code permits.
fn over_only_head(crossings: &[[Arc; 4]], arc: Arc, s0: Slot, s1: Slot) -> Slot {
    let next = |head: Slot| {
        let out = head.rotate(2);
        crossings[out.crossing][out.pos]
    };
    if next(s1) == arc + 1 && next(s0) != arc + 1 {
        s1
    } else {
        s0
    }
}

fn trace_component(
    crossings: &[[Arc; 4]],
    slots: &BTreeMap<Arc, [Slot; 2]>,
    start: Arc,
    start_head: Slot,
    over_forward: &mut [Option<bool>],
    heads: &mut BTreeMap<Arc, Slot>,
    tails: &mut BTreeMap<Arc, Slot>,
) -> Result<Vec<Arc>, DiagramError> {
    let mut comp = Vec::new();
    let mut arc = start;
    let mut head = start_head;
    loop {
        let tail = other_slot(slots, arc, head);
        if head.pos == 2 || tail.pos == 0 {
            return Err(DiagramError::NonPlanarInconsistency(format!(
                "arc {arc} runs against the under-strand orientation at crossing {}",
                if head.pos == 2 { head.crossing } else { tail.crossing } + 1
            )));
        }
        if heads.insert(arc, head).is_some() {
            return Err(DiagramError::NonPlanarInconsistency(format!(
                "arc {arc} is traversed twice while tracing a component"
            )));
        }
        tails.insert(arc, tail);
        comp.push(arc);
        if head.pos == 1 || head.pos == 3 {
            let fwd = head.pos == 1;
            if over_forward[head.crossing].replace(fwd).is_some_and(|f| f != fwd) {
                return Err(DiagramError::NonPlanarInconsistency(format!(
                    "over-strand direction is ambiguous at crossing {}",
                    head.crossing + 1
                )));
            }
        }
        let out = head.rotate(2);
        let next = crossings[out.crossing][out.pos];
        let next_head = other_slot(slots, next, out);
        if next == start {
            if next_head != start_head {
                return Err(DiagramError::NonPlanarInconsistency(format!(
                    "component through arc {start} does not close consistently"
                )));
            }
            return Ok(comp);
        }
        arc = next;
        head = next_head;
    }
}

// ---------------------------------------------------------------------------
// parsing

struct Cursor<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Cursor<'a> {
    fn skip_sep(&mut self) {
        while self.i < self.s.len() && (self.s[self.i].is_ascii_whitespace() || self.s[self.i] == b',') {
            self.i += 1;
        }
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, b: u8) -> Result<(), DiagramError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == b => {
                self.i += 1;
                Ok(())
            }
            other => Err(DiagramError::MalformedSyntax(format!(
                "expected '{}' at offset {}, found {}",
                b as char,
                self.i,
                other.map_or("end of input".to_string(), |c| format!("'{}'", c as char))
            ))),
        }
    }

    fn number(&mut self) -> Result<u32, DiagramError> {
        self.skip_ws();
        let begin = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if begin == self.i {
            return Err(DiagramError::MalformedSyntax(format!(
                "expected a non-negative integer at offset {begin}"
            )));
        }
        std::str::from_utf8(&self.s[begin..self.i])
            .unwrap()
            .parse()
            .map_err(|e| DiagramError::MalformedSyntax(format!("bad integer at offset {begin}: {e}")))
    }
}

/// Parses a PD code such as `"X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"`. An optional
/// `PD[...]` wrapper and comma separators are accepted; the empty string is
/// the crossingless unknot.
pub fn parse_pd(text: &str) -> Result<Diagram, DiagramError> {
    let mut body = text.trim();
    if let Some(rest) = body.strip_prefix("PD[") {
        body = rest
            .strip_suffix(']')
            .ok_or_else(|| DiagramError::MalformedSyntax("unterminated PD[".into()))?;
    }
    let mut cur = Cursor { s: body.as_bytes(), i: 0 };
    let mut crossings = Vec::new();
    loop {
        cur.skip_sep();
        match cur.peek() {
            None => break,
            Some(b'X') => {
                cur.i += 1;
                cur.eat(b'[')?;
                let mut x = [0; 4];
                for (k, slot) in x.iter_mut().enumerate() {
                    if k > 0 {
                        cur.eat(b',')?;
                    }
                    *slot = cur.number()?;
                }
                cur.eat(b']')?;
                crossings.push(x);
            }
            Some(c) => {
                return Err(DiagramError::MalformedSyntax(format!(
                    "unexpected '{}' at offset {}",
                    c as char, cur.i
                )))
            }
        }
    }
    Diagram::from_crossings(crossings)
}

/// Parses a signed Gauss code such as `"O1-U2-O3-U1-O2-U3-"` for a knot.
/// The sign after each visit is the crossing sign.
pub fn parse_gauss(text: &str) -> Result<Diagram, DiagramError> {
    let mut cur = Cursor { s: text.trim().as_bytes(), i: 0 };
    // (over?, crossing id, sign)
    let mut visits: Vec<(bool, u32, i8)> = Vec::new();
    loop {
        cur.skip_sep();
        let over = match cur.peek() {
            None => break,
            Some(b'O') | Some(b'o') => true,
            Some(b'U') | Some(b'u') => false,
            Some(c) => {
                return Err(DiagramError::MalformedSyntax(format!(
                    "unexpected '{}' at offset {} (expected O or U)",
                    c as char, cur.i
                )))
            }
        };
        cur.i += 1;
        let id = cur.number()?;
        let sign = match cur.peek() {
            Some(b'+') => 1,
            Some(b'-') => -1,
            _ => {
                return Err(DiagramError::MalformedSyntax(format!(
                    "missing crossing sign after visit of crossing {id}"
                )))
            }
        };
        cur.i += 1;
        visits.push((over, id, sign));
    }
    if visits.is_empty() {
        return Ok(Diagram::unknot());
    }

    // crossing id -> (under visit, over visit, sign)
    let mut table: BTreeMap<u32, (Option<usize>, Option<usize>, i8)> = BTreeMap::new();
    for (t, &(over, id, sign)) in visits.iter().enumerate() {
        let e = table.entry(id).or_insert((None, None, sign));
        if e.2 != sign {
            return Err(DiagramError::MalformedSyntax(format!(
                "crossing {id} is given both signs"
            )));
        }
        let target = if over { &mut e.1 } else { &mut e.0 };
        if target.replace(t).is_some() {
            return Err(DiagramError::UnbalancedCode(id));
        }
    }
    let len = visits.len() as u32;
    let incoming = |t: usize| if t == 0 { len } else { t as u32 };
    let outgoing = |t: usize| t as u32 + 1;
    let mut crossings = Vec::new();
    for (&id, &(under, over, sign)) in &table {
        let (Some(u), Some(o)) = (under, over) else {
            return Err(DiagramError::UnbalancedCode(id));
        };
        crossings.push(if sign > 0 {
            [incoming(u), outgoing(o), outgoing(u), incoming(o)]
        } else {
            [incoming(u), incoming(o), outgoing(u), outgoing(o)]
        });
    }
    Diagram::from_crossings(crossings)
}

// ---------------------------------------------------------------------------
// Reidemeister moves

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Insert a kink on an arc.
    R1Plus,
    /// Remove a kink, located by its loop arc.
    R1Minus,
    /// Push the first arc across the second; both must border one face.
    R2Plus,
    /// Remove a bigon, located by one of its two arcs.
    R2Minus,
    /// Slide a strand across the opposite crossing of a triangular face.
    R3,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoveKind::R1Plus => "R1+",
            MoveKind::R1Minus => "R1-",
            MoveKind::R2Plus => "R2+",
            MoveKind::R2Minus => "R2-",
            MoveKind::R3 => "R3",
        })
    }
}

/// Where and how to apply a move.
///
/// `site` holds arc labels: one arc for `R1+`, `R1-` and `R2-`, two for
/// `R2+` and the (up to three) sides of the triangle for `R3`. The
/// `chirality` flag selects a positive kink for `R1+` and "first arc over"
/// for `R2+`; `R1-`, `R2-` and `R3` ignore it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveSpec {
    pub kind: MoveKind,
    pub site: Vec<Arc>,
    pub chirality: bool,
}

impl MoveSpec {
    pub fn new(kind: MoveKind, site: impl Into<Vec<Arc>>, chirality: bool) -> Self {
        MoveSpec { kind, site: site.into(), chirality }
    }
}

impl fmt::Display for MoveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.kind, self.site)?;
        if matches!(self.kind, MoveKind::R1Plus | MoveKind::R2Plus) {
            write!(f, "{}", if self.chirality { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Applies a Reidemeister move, returning the new diagram.
pub fn apply_move(d: &Diagram, m: &MoveSpec) -> Result<Diagram, DiagramError> {
    apply_move_traced(d, m).map(|(d, _)| d)
}

/// Applies a move and also returns a move that undoes it.
pub fn apply_move_traced(d: &Diagram, m: &MoveSpec) -> Result<(Diagram, MoveSpec), DiagramError> {
    match m.kind {
        MoveKind::R1Plus => r1_plus(d, site_arc(d, m, 0)?, m.chirality),
        MoveKind::R1Minus => r1_minus(d, site_arc(d, m, 0)?),
        MoveKind::R2Plus => r2_plus(d, site_arc(d, m, 0)?, site_arc(d, m, 1)?, m.chirality),
        MoveKind::R2Minus => r2_minus(d, site_arc(d, m, 0)?),
        MoveKind::R3 => {
            if m.site.is_empty() {
                return Err(DiagramError::SiteNotFound("R3 needs at least one arc".into()));
            }
            for k in 0..m.site.len() {
                site_arc(d, m, k)?;
            }
            r3(d, &m.site)
        }
    }
}

fn site_arc(d: &Diagram, m: &MoveSpec, k: usize) -> Result<Option<Arc>, DiagramError> {
    let arc = *m
        .site
        .get(k)
        .ok_or_else(|| DiagramError::SiteNotFound(format!("{} needs {} site arc(s)", m.kind, k + 1)))?;
    if d.crossing_count() == 0 {
        // the crossingless unknot has a single unlabelled arc
        return Ok(None);
    }
    if d.head(arc).is_none() {
        return Err(DiagramError::SiteNotFound(format!("arc {arc} is not in the diagram")));
    }
    Ok(Some(arc))
}

fn fresh_label(d: &Diagram) -> Arc {
    d.arcs().max().map_or(1, |a| a + 1)
}

fn r1_plus(d: &Diagram, arc: Option<Arc>, positive: bool) -> Result<(Diagram, MoveSpec), DiagramError> {
    let mut crossings = d.crossings.clone();
    let (a, c, b) = match arc {
        None => (1, 1, 2),
        Some(a) => {
            let c = fresh_label(d);
            let head = d.head(a).unwrap();
            crossings[head.crossing][head.pos] = c;
            (a, c, c + 1)
        }
    };
    crossings.push(if positive { [a, c, b, b] } else { [a, b, b, c] });
    let out = Diagram::from_crossings(crossings)?;
    Ok((out, MoveSpec::new(MoveKind::R1Minus, vec![b], positive)))
}

fn r1_minus(d: &Diagram, arc: Option<Arc>) -> Result<(Diagram, MoveSpec), DiagramError> {
    let Some(b) = arc else {
        return Err(DiagramError::PatternMismatch("the crossingless diagram has no kink".into()));
    };
    let [s, t] = d.slots()[&b];
    let adjacent = (s.pos + 1) % 4 == t.pos || (t.pos + 1) % 4 == s.pos;
    if s.crossing != t.crossing || !adjacent {
        return Err(DiagramError::PatternMismatch(format!("arc {b} is not the loop of a kink")));
    }
    let x = s.crossing;
    let rest: Vec<usize> = (0..4).filter(|&p| p != s.pos && p != t.pos).collect();
    let (u, v) = (d.crossings[x][rest[0]], d.crossings[x][rest[1]]);
    let sign = d.crossing_sign(x) > 0;
    let mut crossings = d.crossings.clone();
    crossings.remove(x);
    if u == v {
        if crossings.is_empty() {
            return Ok((Diagram::unknot(), MoveSpec::new(MoveKind::R1Plus, vec![1], sign)));
        }
        return Err(DiagramError::PatternMismatch(
            "removing the kink would leave a crossingless component".into(),
        ));
    }
    // keep the label of the arc entering the kink
    let (keep, drop) = if d.head(u).is_some_and(|h| h.crossing == x) { (u, v) } else { (v, u) };
    for cx in crossings.iter_mut() {
        for l in cx.iter_mut() {
            if *l == drop {
                *l = keep;
            }
        }
    }
    let out = Diagram::from_crossings(crossings)?;
    Ok((out, MoveSpec::new(MoveKind::R1Plus, vec![keep], sign)))
}

/// Finds the first face having darts along both `a` and `b`.
fn shared_face(d: &Diagram, a: Arc, b: Arc) -> Option<(Slot, Slot)> {
    for face in d.faces() {
        let da = face.iter().find(|&&s| d.label(s) == a);
        let db = face.iter().find(|&&s| d.label(s) == b);
        if let (Some(&da), Some(&db)) = (da, db) {
            return Some((da, db));
        }
    }
    None
}

fn r2_plus(
    d: &Diagram,
    a: Option<Arc>,
    b: Option<Arc>,
    a_over: bool,
) -> Result<(Diagram, MoveSpec), DiagramError> {
    let (Some(a), Some(b)) = (a, b) else {
        return Err(DiagramError::SiteNotFound("R2+ needs two labelled arcs".into()));
    };
    if a == b {
        return Err(DiagramError::PatternMismatch("R2+ needs two distinct arcs".into()));
    }
    let (a_end, b_end) = shared_face(d, a, b)
        .ok_or_else(|| DiagramError::PatternMismatch(format!("arcs {a} and {b} do not share a face")))?;
    // Walking the face boundary, `a` runs from its start to `a_end` and `b`
    // from its start to `b_end`. The finger of `a` crosses `b` first at P1
    // and then at P2; `b` meets P2 before P1.
    let a_with_walk = d.head(a) == Some(a_end);
    let b_with_walk = d.head(b) == Some(b_end);
    let fresh = fresh_label(d);
    let (a_mid, a_last, b_mid, b_left) = (fresh, fresh + 1, fresh + 2, fresh + 3);
    let (a_first, b_right) = (a, b);

    let mut crossings = d.crossings.clone();
    crossings[a_end.crossing][a_end.pos] = a_last;
    crossings[b_end.crossing][b_end.pos] = b_left;

    // rays in counterclockwise order: south, east, north, west
    let p1 = [a_first, b_mid, a_mid, b_left];
    let p2 = [a_last, b_right, a_mid, b_mid];
    // index of the incoming under-ray
    let (in1, in2) = if a_over {
        (if b_with_walk { 1 } else { 3 }, if b_with_walk { 1 } else { 3 })
    } else {
        (if a_with_walk { 0 } else { 2 }, if a_with_walk { 2 } else { 0 })
    };
    let rot = |x: [Arc; 4], k: usize| [x[k % 4], x[(k + 1) % 4], x[(k + 2) % 4], x[(k + 3) % 4]];
    crossings.push(rot(p1, in1));
    crossings.push(rot(p2, in2));
    let out = Diagram::from_crossings(crossings)?;
    Ok((out, MoveSpec::new(MoveKind::R2Minus, vec![a_mid], true)))
}

fn r2_minus(d: &Diagram, arc: Option<Arc>) -> Result<(Diagram, MoveSpec), DiagramError> {
    let Some(m) = arc else {
        return Err(DiagramError::PatternMismatch("the crossingless diagram has no bigon".into()));
    };
    let face = d
        .faces()
        .into_iter()
        .find(|f| f.len() == 2 && f.iter().any(|&s| d.label(s) == m))
        .ok_or_else(|| DiagramError::PatternMismatch(format!("arc {m} does not bound a bigon")))?;
    let slots = d.slots();
    let (c1, c2) = (face[0].crossing, face[1].crossing);
    if c1 == c2 {
        return Err(DiagramError::PatternMismatch("degenerate bigon".into()));
    }
    let arcs = [d.label(face[0]), d.label(face[1])];
    let is_over = |arc: Arc, c: usize| {
        slots[&arc]
            .iter()
            .any(|s| s.crossing == c && s.pos % 2 == 1)
    };
    if arcs.iter().any(|&x| is_over(x, c1) != is_over(x, c2)) {
        return Err(DiagramError::PatternMismatch(format!(
            "bigon at arc {m} alternates, R2 does not apply"
        )));
    }
    let far = |c: usize, over: bool| -> Arc {
        let ps: [usize; 2] = if over { [1, 3] } else { [0, 2] };
        let labels = ps.map(|p| d.crossings[c][p]);
        if arcs.contains(&labels[0]) { labels[1] } else { labels[0] }
    };
    let (o1, o2, u1, u2) = (far(c1, true), far(c2, true), far(c1, false), far(c2, false));
    let mut subst: BTreeMap<Arc, Arc> = BTreeMap::new();
    let unite = |x: Arc, y: Arc, subst: &mut BTreeMap<Arc, Arc>| {
        let root = |mut z: Arc, s: &BTreeMap<Arc, Arc>| {
            while let Some(&w) = s.get(&z) {
                z = w;
            }
            z
        };
        let (rx, ry) = (root(x, subst), root(y, subst));
        if rx != ry {
            subst.insert(rx.max(ry), rx.min(ry));
        }
    };
    unite(o1, o2, &mut subst);
    unite(u1, u2, &mut subst);
    let resolve = |mut z: Arc| {
        while let Some(&w) = subst.get(&z) {
            z = w;
        }
        z
    };
    let crossings: Vec<[Arc; 4]> = d
        .crossings
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != c1 && c != c2)
        .map(|(_, x)| x.map(resolve))
        .collect();
    let present: BTreeSet<Arc> = crossings.iter().flatten().copied().collect();
    let (ro, ru) = (resolve(o1), resolve(u1));
    if !present.contains(&ro) || !present.contains(&ru) {
        if crossings.is_empty() && d.component_count() == 1 {
            return Ok((Diagram::unknot(), MoveSpec::new(MoveKind::R1Plus, vec![1], true)));
        }
        return Err(DiagramError::PatternMismatch(
            "removing the bigon would leave a crossingless component".into(),
        ));
    }
    let out = Diagram::from_crossings(crossings)?;
    Ok((out, MoveSpec::new(MoveKind::R2Plus, vec![ro, ru], true)))
}

/// Triangular faces whose strands have an acyclic height order; these are
/// the sites where R3 applies. Each site lists the three side arcs.
pub fn r3_sites(d: &Diagram) -> Vec<[Arc; 3]> {
    d.faces()
        .into_iter()
        .filter(|f| f.len() == 3)
        .filter(|f| r3_layout(d, f).is_some())
        .map(|f| [d.label(f[0]), d.label(f[1]), d.label(f[2])])
        .collect()
}

/// Arcs bounding a bigon that R2- can remove.
pub fn r2_sites(d: &Diagram) -> Vec<Arc> {
    d.arcs()
        .filter(|&a| r2_minus(d, Some(a)).is_ok())
        .collect()
}

/// Loop arcs of kinks.
pub fn r1_sites(d: &Diagram) -> Vec<Arc> {
    d.arcs()
        .filter(|&a| {
            let [s, t] = d.slots()[&a];
            s.crossing == t.crossing && ((s.pos + 1) % 4 == t.pos || (t.pos + 1) % 4 == s.pos)
        })
        .collect()
}

fn r3_layout(d: &Diagram, face: &[Slot]) -> Option<()> {
    let slots = d.slots();
    let mut cs: Vec<usize> = face.iter().map(|s| s.crossing).collect();
    cs.sort();
    cs.dedup();
    if cs.len() != 3 {
        return None;
    }
    let sides: Vec<Arc> = face.iter().map(|&s| d.label(s)).collect();
    let distinct: BTreeSet<Arc> = sides.iter().copied().collect();
    if distinct.len() != 3 {
        return None;
    }
    // some side must be over at both of its ends
    let over_both = sides.iter().any(|a| slots[a].iter().all(|s| s.pos % 2 == 1));
    over_both.then_some(())
}

fn r3(d: &Diagram, site: &[Arc]) -> Result<(Diagram, MoveSpec), DiagramError> {
    let face = d
        .faces()
        .into_iter()
        .find(|f| f.len() == 3 && site.iter().all(|a| f.iter().any(|&s| d.label(s) == *a)))
        .ok_or_else(|| DiagramError::PatternMismatch(format!("arcs {site:?} do not bound a triangle")))?;
    if r3_layout(d, &face).is_none() {
        return Err(DiagramError::PatternMismatch(format!(
            "triangle {site:?} is cyclically layered, R3 does not apply"
        )));
    }
    let mut crossings = d.crossings.clone();
    let sides: Vec<Arc> = face.iter().map(|&s| d.label(s)).collect();
    for &e in &sides {
        // e runs from p to q; the strand enters p through the slot opposite
        // e's tail and leaves q through the slot opposite e's head.
        let (p_out, q_in) = (d.tail(e).unwrap(), d.head(e).unwrap());
        let (p_in, q_out) = (p_out.rotate(2), q_in.rotate(2));
        let (x_in, x_out) = (d.label(p_in), d.label(q_out));
        crossings[q_in.crossing][q_in.pos] = x_in;
        crossings[q_out.crossing][q_out.pos] = e;
        crossings[p_in.crossing][p_in.pos] = e;
        crossings[p_out.crossing][p_out.pos] = x_out;
    }
    let out = Diagram::from_crossings(crossings)?;
    Ok((out, MoveSpec::new(MoveKind::R3, sides, false)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";

    #[test]
    fn empty_code_is_unknot() {
        let d = parse_pd("").unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.crossing_signs(), (0, 0));
        assert_eq!(parse_gauss("  ").unwrap(), d);
    }

    #[test]
    fn trefoil_signs_and_components() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.crossing_signs(), (0, 3));
        assert_eq!(d.mirror().crossing_signs(), (3, 0));
        assert_eq!(d.components()[0], vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn pd_wrapper_and_commas() {
        let d = parse_pd("PD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]]").unwrap();
        assert_eq!(d, parse_pd(TREFOIL).unwrap());
    }

    #[test]
    fn three_pairwise_linked_loops_are_rejected() {
        // every pair of loops would cross exactly once, which no planar
        // diagram allows
        let err = parse_pd("X[1,4,2,3] X[3,6,4,5] X[5,2,6,1]").unwrap_err();
        assert!(matches!(err, DiagramError::NonPlanarInconsistency(_)), "{err}");
    }

    #[test]
    fn label_multiplicity() {
        let err = parse_pd("X[1,2,3,4]").unwrap_err();
        assert_eq!(err, DiagramError::ArcCountMismatch { arc: 1, count: 1 });
        let err = parse_pd("X[1,1,1,2] X[2,3,3,2]").unwrap_err();
        assert!(matches!(err, DiagramError::ArcCountMismatch { arc: 1, count: 3 }));
    }

    #[test]
    fn syntax_errors() {
        for bad in ["X[1,2,3]", "Y[1,1,2,2]", "X[1,1,2,2", "X[1,a,2,2]", "X[-1,1,2,2]"] {
            assert!(
                matches!(parse_pd(bad), Err(DiagramError::MalformedSyntax(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn kinks_have_expected_sign() {
        assert_eq!(parse_pd("X[1,1,2,2]").unwrap().crossing_signs(), (1, 0));
        assert_eq!(parse_pd("X[1,2,2,1]").unwrap().crossing_signs(), (0, 1));
        assert_eq!(parse_pd("X[2,1,1,2]").unwrap().crossing_signs(), (0, 1));
    }

    #[test]
    fn gauss_trefoil_matches_pd_structure() {
        let g = parse_gauss("O1-U2-O3-U1-O2-U3-").unwrap();
        assert_eq!(g.crossing_count(), 3);
        assert_eq!(g.component_count(), 1);
        assert_eq!(g.crossing_signs(), (0, 3));
        let again = parse_pd(&g.to_pd()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn gauss_errors() {
        assert_eq!(parse_gauss("O1-O1-").unwrap_err(), DiagramError::UnbalancedCode(1));
        assert_eq!(parse_gauss("O1-U2-").unwrap_err(), DiagramError::UnbalancedCode(1));
        assert!(matches!(parse_gauss("O1-U1+"), Err(DiagramError::MalformedSyntax(_))));
        assert!(matches!(parse_gauss("O1U1"), Err(DiagramError::MalformedSyntax(_))));
        assert_eq!(parse_gauss("O1+U1+").unwrap().to_pd(), "X[1,1,2,2]");
    }

    #[test]
    fn faces_count_on_sphere() {
        let d = parse_pd(TREFOIL).unwrap();
        let faces = d.faces();
        assert_eq!(faces.len(), 5);
        let mut sizes: Vec<usize> = faces.iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 2, 2, 3, 3]);
    }

    #[test]
    fn r1_roundtrip_on_unknot() {
        let u = Diagram::unknot();
        let (k, inv) = apply_move_traced(&u, &MoveSpec::new(MoveKind::R1Plus, vec![1], true)).unwrap();
        assert_eq!(k.to_pd(), "X[1,1,2,2]");
        let back = apply_move(&k, &inv).unwrap();
        assert_eq!(back.crossing_count(), 0);
    }

    #[test]
    fn r1_on_trefoil_changes_count_by_one() {
        let d = parse_pd(TREFOIL).unwrap();
        for positive in [true, false] {
            let (k, inv) =
                apply_move_traced(&d, &MoveSpec::new(MoveKind::R1Plus, vec![2], positive)).unwrap();
            assert_eq!(k.crossing_count(), 4);
            let (p, m) = k.crossing_signs();
            assert_eq!((p, m), if positive { (1, 3) } else { (0, 4) });
            let back = apply_move(&k, &inv).unwrap();
            assert_eq!(back.crossing_count(), 3);
            assert_eq!(back.crossing_signs(), (0, 3));
        }
    }

    #[test]
    fn r2_then_inverse() {
        let d = parse_pd(TREFOIL).unwrap();
        let face = &d.faces()[0];
        let (a, b) = (d.label(face[0]), d.label(face[1]));
        for over in [true, false] {
            let (e, inv) = apply_move_traced(&d, &MoveSpec::new(MoveKind::R2Plus, vec![a, b], over)).unwrap();
            assert_eq!(e.crossing_count(), 5);
            assert_eq!(e.writhe(), d.writhe());
            let back = apply_move(&e, &inv).unwrap();
            assert_eq!(back.crossing_count(), 3);
        }
    }

    #[test]
    fn r2_needs_shared_face() {
        let d = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        let faces = d.faces();
        let labels = |f: &Vec<Slot>| f.iter().map(|&s| d.label(s)).collect::<BTreeSet<_>>();
        let mut found = None;
        'outer: for a in d.arcs() {
            for b in d.arcs() {
                if a != b && !faces.iter().any(|f| labels(f).contains(&a) && labels(f).contains(&b)) {
                    found = Some((a, b));
                    break 'outer;
                }
            }
        }
        let (a, b) = found.unwrap();
        let err = apply_move(&d, &MoveSpec::new(MoveKind::R2Plus, vec![a, b], true)).unwrap_err();
        assert!(matches!(err, DiagramError::PatternMismatch(_)));
    }

    #[test]
    fn alternating_triangles_reject_r3() {
        let d = parse_pd(TREFOIL).unwrap();
        assert!(r3_sites(&d).is_empty());
        let tri: Vec<Arc> = d.faces().into_iter().find(|f| f.len() == 3).unwrap()
            .iter().map(|&s| d.label(s)).collect();
        let err = apply_move(&d, &MoveSpec::new(MoveKind::R3, tri, false)).unwrap_err();
        assert!(matches!(err, DiagramError::PatternMismatch(_)));
    }

    fn shared_face_pairs(d: &Diagram) -> Vec<(Arc, Arc)> {
        let mut pairs = BTreeSet::new();
        for f in d.faces() {
            for &x in &f {
                for &y in &f {
                    if d.label(x) != d.label(y) {
                        pairs.insert((d.label(x), d.label(y)));
                    }
                }
            }
        }
        pairs.into_iter().collect()
    }

    #[test]
    fn r2_everywhere_on_figure_eight() {
        let d = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        for (a, b) in shared_face_pairs(&d) {
            for over in [true, false] {
                let m = MoveSpec::new(MoveKind::R2Plus, vec![a, b], over);
                let (e, inv) = apply_move_traced(&d, &m).unwrap_or_else(|err| panic!("{m}: {err}"));
                assert_eq!(e.crossing_count(), 6);
                assert_eq!(e.writhe(), 0);
                assert_eq!(e.component_count(), 1);
                let back = apply_move(&e, &inv).unwrap();
                assert_eq!(back.crossing_count(), 4);
            }
        }
    }

    #[test]
    fn r3_after_r2_preserves_counts() {
        let d = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        let mut applied = 0;
        for (a, b) in shared_face_pairs(&d) {
            for over in [true, false] {
                let e = apply_move(&d, &MoveSpec::new(MoveKind::R2Plus, vec![a, b], over)).unwrap();
                for site in r3_sites(&e) {
                    let m = MoveSpec::new(MoveKind::R3, site.to_vec(), false);
                    let (f, inv) = apply_move_traced(&e, &m).unwrap_or_else(|err| panic!("{m} on {e}: {err}"));
                    assert_eq!(f.crossing_count(), 6);
                    assert_eq!(f.crossing_signs(), e.crossing_signs());
                    assert_ne!(f, e);
                    let back = apply_move(&f, &inv).unwrap();
                    assert_eq!(back, e);
                    applied += 1;
                }
            }
        }
        assert!(applied > 0);
    }

    #[test]
    fn missing_site() {
        let d = parse_pd(TREFOIL).unwrap();
        let err = apply_move(&d, &MoveSpec::new(MoveKind::R1Plus, vec![99], true)).unwrap_err();
        assert!(matches!(err, DiagramError::SiteNotFound(_)));
        let err = apply_move(&d, &MoveSpec::new(MoveKind::R2Plus, vec![1], true)).unwrap_err();
        assert!(matches!(err, DiagramError::SiteNotFound(_)));
        let err = apply_move(&d, &MoveSpec::new(MoveKind::R1Minus, vec![1], true)).unwrap_err();
        assert!(matches!(err, DiagramError::PatternMismatch(_)));
    }
}
