//! Peak/trough dating of an extracted cycle.

use serde::{Deserialize, Serialize};

use crate::series::YearMonth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnKind {
    Peak,
    Trough,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    /// 1-based position in the cycle series.
    pub index: usize,
    pub date: YearMonth,
    pub kind: TurnKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub from: YearMonth,
    pub to: YearMonth,
    pub months: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dating {
    pub min_phase_months: usize,
    pub points: Vec<TurningPoint>,
    /// Trough to peak.
    pub expansions: Vec<Phase>,
    /// Peak to trough.
    pub recessions: Vec<Phase>,
}

#[derive(Clone, Copy)]
struct Candidate {
    pos: usize,
    kind: TurnKind,
    value: f64,
}

impl Candidate {
    fn more_extreme_than(&self, other: &Candidate) -> bool {
        match self.kind {
            TurnKind::Peak => self.value > other.value,
            TurnKind::Trough => self.value < other.value,
        }
    }
}

fn local_extrema(cycle: &[f64]) -> Vec<Candidate> {
    let mut out = Vec::new();
    for t in 1..cycle.len().saturating_sub(1) {
        let (prev, cur, next) = (cycle[t - 1], cycle[t], cycle[t + 1]);
        let kind = if cur > prev && cur >= next {
            TurnKind::Peak
        } else if cur < prev && cur <= next {
            TurnKind::Trough
        } else {
            continue;
        };
        out.push(Candidate { pos: t, kind, value: cur });
    }
    out
}

/// Collapse neighbouring extrema of the same kind into the more extreme one.
fn enforce_alternation(points: &mut Vec<Candidate>) {
    let mut out: Vec<Candidate> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        match out.last_mut() {
            Some(last) if last.kind == p.kind => {
                if p.more_extreme_than(last) {
                    *last = p;
                }
            }
            _ => out.push(p),
        }
    }
    *points = out;
}

/// Alternating peaks and troughs of `cycle` at least `min_phase_months`
/// apart. Too-close neighbours are resolved by dropping the pair with the
/// smallest swing (only the outer point when the pair touches either end).
pub fn turning_points(cycle: &[f64], start: YearMonth, min_phase_months: usize) -> Dating {
    let mut pts = local_extrema(cycle);
    loop {
        enforce_alternation(&mut pts);
        let closest = pts
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].pos - w[0].pos < min_phase_months)
            .map(|(i, w)| (i, (w[1].value - w[0].value).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((i, _)) = closest else { break };
        if i == 0 {
            pts.remove(0);
        } else if i + 2 == pts.len() {
            pts.pop();
        } else {
            pts.drain(i..i + 2);
        }
    }

    let points: Vec<TurningPoint> = pts
        .iter()
        .map(|c| TurningPoint {
            index: c.pos + 1,
            date: start.offset(c.pos as i64),
            kind: c.kind,
            value: c.value,
        })
        .collect();
    let mut expansions = Vec::new();
    let mut recessions = Vec::new();
    for w in points.windows(2) {
        let phase = Phase {
            from: w[0].date,
            to: w[1].date,
            months: w[1].index - w[0].index,
        };
        match w[0].kind {
            TurnKind::Trough => expansions.push(phase),
            TurnKind::Peak => recessions.push(phase),
        }
    }
    Dating {
        min_phase_months,
        points,
        expansions,
        recessions,
    }
}
