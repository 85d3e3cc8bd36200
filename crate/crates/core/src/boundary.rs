//! Segments as oriented crack chains, move angles and orientations.
//!
//! Angles follow the Freeman convention on a y-down image: `(m1 - m2) mod 4`
//! with `+1` for a clockwise quarter turn, `-1` counter-clockwise, `0` for a
//! straight step and undefined for a U-turn. A closed boundary therefore
//! sums to `-4` when its region lies on the left (a finite face) and `+4`
//! for the infinite face.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dart::Dart;
use crate::error::{PyramidError, Result};
use crate::grid::{Crack, Point};
use crate::level::Level;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Move {
    Right = 0,
    Up = 1,
    Left = 2,
    Down = 3,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::Right, Move::Up, Move::Left, Move::Down];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Move> {
        Move::ALL.get(code as usize).copied()
    }

    pub fn opposite(self) -> Move {
        Move::ALL[(self.code() as usize + 2) % 4]
    }

    /// Unit step in image coordinates (y grows downwards).
    pub fn delta(self) -> (i32, i32) {
        match self {
            Move::Right => (1, 0),
            Move::Up => (0, -1),
            Move::Left => (-1, 0),
            Move::Down => (0, 1),
        }
    }
}

impl From<Move> for u8 {
    fn from(m: Move) -> u8 {
        m.code()
    }
}

impl TryFrom<u8> for Move {
    type Error = String;

    fn try_from(code: u8) -> Result<Self, Self::Error> {
        Move::from_code(code).ok_or_else(|| format!("move code {code} is not in 0..4"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Angle {
    Straight,
    Clockwise,
    CounterClockwise,
    Undefined,
}

impl Angle {
    /// `Some(0 | 1 | -1)`, or `None` for a U-turn.
    pub fn value(self) -> Option<i32> {
        match self {
            Angle::Straight => Some(0),
            Angle::Clockwise => Some(1),
            Angle::CounterClockwise => Some(-1),
            Angle::Undefined => None,
        }
    }
}

/// Angle between two consecutive moves.
pub fn angle(m1: Move, m2: Move) -> Angle {
    match (m1.code() + 4 - m2.code()) % 4 {
        0 => Angle::Straight,
        1 => Angle::Clockwise,
        2 => Angle::Undefined,
        _ => Angle::CounterClockwise,
    }
}

/// A connected chain of oriented cracks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrackChain {
    pub start: Point,
    pub moves: Vec<Move>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrackRecord {
    pub x: i32,
    pub y: i32,
    #[serde(rename = "move")]
    pub mv: Move,
}

impl CrackChain {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn cracks(&self) -> impl Iterator<Item = Crack> + '_ {
        self.moves.iter().scan(self.start, |p, &mv| {
            let c = Crack { start: *p, mv };
            *p = p.step(mv);
            Some(c)
        })
    }

    pub fn end(&self) -> Point {
        self.moves.iter().fold(self.start, |p, &m| p.step(m))
    }

    /// `x,y:codes`, e.g. `3,1:0003`.
    pub fn freeman(&self) -> String {
        let codes: String = self.moves.iter().map(|m| char::from(b'0' + m.code())).collect();
        format!("{},{}:{}", self.start.x, self.start.y, codes)
    }

    pub fn parse_freeman(s: &str) -> Option<CrackChain> {
        let (point, codes) = s.split_once(':')?;
        let (x, y) = point.split_once(',')?;
        let moves = codes.bytes().map(|b| b.checked_sub(b'0').and_then(Move::from_code)).collect::<Option<Vec<_>>>()?;
        Some(CrackChain { start: Point::new(x.trim().parse().ok()?, y.trim().parse().ok()?), moves })
    }

    pub fn records(&self) -> Vec<CrackRecord> {
        self.cracks().map(|c| CrackRecord { x: c.start.x, y: c.start.y, mv: c.mv }).collect()
    }
}

impl fmt::Display for CrackChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.freeman())
    }
}

/// External boundary darts reduced into one dart, with their cracks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub dart: Dart,
    pub darts: Vec<Dart>,
    pub chain: CrackChain,
}

impl Segment {
    pub fn first_move(&self) -> Move {
        self.chain.moves[0]
    }

    pub fn last_move(&self) -> Move {
        *self.chain.moves.last().expect("segments are never empty")
    }
}

impl Level<'_> {
    /// The segment of `d` as base darts and cracks.
    pub fn segment(&self, d: Dart) -> Result<Segment> {
        self.check_alive(d)?;
        let darts = self.pyramid().segment_darts(self.index(), d)?;
        let grid = self.pyramid().grid();
        let first = grid.crack(darts[0]);
        let mut moves = Vec::with_capacity(darts.len());
        let mut at = first.start;
        for &x in &darts {
            let c = grid.crack(x);
            if c.start != at {
                return Err(PyramidError::Corrupt(format!("segment of {d} is disconnected at {x}")));
            }
            moves.push(c.mv);
            at = c.end();
        }
        Ok(Segment { dart: d, darts, chain: CrackChain { start: first.start, moves } })
    }

    /// `(Fm(d), Lm(d))`: moves of the first crack, `d`, and of the last one,
    /// `alpha0(alpha_i(d))`.
    pub fn first_last_moves(&self, d: Dart) -> Result<(Move, Move)> {
        self.check_alive(d)?;
        let grid = self.pyramid().grid();
        Ok((grid.move_of(d), grid.move_of(self.alpha(d).alpha0())))
    }

    fn moves(&self, d: Dart) -> (Move, Move) {
        let grid = self.pyramid().grid();
        (grid.move_of(d), grid.move_of(self.alpha(d).alpha0()))
    }

    /// Sum of the turns along the segment of `d`.
    pub fn dart_orientation(&self, d: Dart) -> Result<i32> {
        let seg = self.segment(d)?;
        seg.chain
            .moves
            .windows(2)
            .try_fold(0, |acc, w| angle(w[0], w[1]).value().map(|a| acc + a).ok_or(PyramidError::UndefinedAngle(d)))
    }

    /// Orientation of `d1..dp` with `d_{j+1} = sigma_i(d_j)`, adding the
    /// closing turn when `closed` is set.
    pub fn sequence_orientation(&self, seq: &[Dart], closed: bool) -> Result<i32> {
        self.sequence_orientation_with(seq, closed, |d| self.dart_orientation(d))
    }

    /// Same as [`sequence_orientation`](Level::sequence_orientation) with the
    /// dart orientations supplied by the caller.
    pub fn sequence_orientation_with(
        &self,
        seq: &[Dart],
        closed: bool,
        mut or: impl FnMut(Dart) -> Result<i32>,
    ) -> Result<i32> {
        let (&first, &last) = match (seq.first(), seq.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Ok(0),
        };
        for &d in seq {
            self.check_alive(d)?;
        }
        for (j, w) in seq.windows(2).enumerate() {
            if self.sigma(w[0]) != w[1] {
                return Err(PyramidError::NotSigmaConsecutive(j + 1));
            }
        }
        let mut total = 0;
        for w in seq.windows(2) {
            total += or(w[0])? + self.junction(w[0], w[1])?;
        }
        total += or(last)?;
        if closed {
            if last == self.alpha(first) || !self.same_face(self.alpha(last), first) {
                return Err(PyramidError::NotClosed);
            }
            total += self.junction(last, first)?;
        }
        Ok(total)
    }

    /// `angle(Lm(a), Fm(b))`.
    pub(crate) fn junction(&self, a: Dart, b: Dart) -> Result<i32> {
        angle(self.moves(a).1, self.moves(b).0).value().ok_or(PyramidError::UndefinedAngle(a))
    }

    fn same_face(&self, a: Dart, b: Dart) -> bool {
        let mut x = a;
        for _ in 0..self.map().dart_count() {
            if x == b {
                return true;
            }
            x = self.phi(x);
            if x == a {
                break;
            }
        }
        false
    }

    /// Orientation of a whole sigma cycle read as a closed boundary.
    pub fn vertex_orientation(&self, v: Dart) -> Result<i32> {
        let cycle = self.vertex_darts(v)?;
        self.sequence_orientation(&cycle, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_table() {
        assert_eq!(angle(Move::Right, Move::Down), Angle::Clockwise);
        assert_eq!(angle(Move::Up, Move::Up), Angle::Straight);
        assert_eq!(angle(Move::Right, Move::Left), Angle::Undefined);
        assert_eq!(angle(Move::Up, Move::Left), Angle::CounterClockwise);
        for a in Move::ALL {
            assert_eq!(angle(a, a.opposite()), Angle::Undefined);
            assert_eq!(a.opposite().opposite(), a);
            assert_eq!(a.opposite().code(), (a.code() + 2) % 4);
        }
    }

    #[test]
    fn freeman_text_round_trip() {
        let chain = CrackChain { start: Point::new(3, 1), moves: vec![Move::Right, Move::Right, Move::Down] };
        assert_eq!(chain.freeman(), "3,1:003");
        assert_eq!(CrackChain::parse_freeman("3,1:003"), Some(chain.clone()));
        assert_eq!(chain.end(), Point::new(5, 2));
        assert!(CrackChain::parse_freeman("3,1:04").is_none());
        let json = serde_json::to_string(&chain.records()).unwrap();
        assert_eq!(json, r#"[{"x":3,"y":1,"move":0},{"x":4,"y":1,"move":0},{"x":5,"y":1,"move":3}]"#);
    }
}
