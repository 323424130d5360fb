//! A 9x9 grid of colored cells traversed by a robot with deterministic moves.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::TransitionConstraint;
use crate::formula::{Formula, State};

pub const SIDE: usize = 9;
pub const CELLS: usize = SIDE * SIDE;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Color {
    Red,
    Blue,
    Green,
    Yellow,
}

impl Color {
    /// Ordered by `rank`.
    pub const ALL: [Color; 4] = [Color::Red, Color::Blue, Color::Green, Color::Yellow];

    /// Integer code used by the color distance: Red 1, Blue 2, Green 3, Yellow 4.
    pub fn rank(self) -> u32 {
        self as u32 + 1
    }

    pub fn from_rank(rank: u32) -> Option<Color> {
        Color::ALL.get(rank.checked_sub(1)? as usize).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
            Color::Green => 'G',
            Color::Yellow => 'Y',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        Color::ALL
            .into_iter()
            .find(|k| k.letter() == c.to_ascii_uppercase())
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "Red",
            Color::Blue => "Blue",
            Color::Green => "Green",
            Color::Yellow => "Yellow",
        }
    }

    pub fn state(self) -> State {
        State::sym(self.name())
    }

    pub fn atom(self) -> Formula {
        Formula::label(self.name())
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("color map has {0} cells, expected {CELLS}")]
    CellCount(usize),
    #[error("color map row {row} has {len} cells, expected {SIDE}")]
    RowLength { row: usize, len: usize },
    #[error("unknown color code {code:?} at row {row}, column {col}")]
    UnknownColor { row: usize, col: usize, code: char },
}

/// Cell colors in row-major order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColorMap {
    cells: Vec<Color>,
}

impl ColorMap {
    pub fn new(cells: Vec<Color>) -> Result<Self, GridError> {
        if cells.len() != CELLS {
            return Err(GridError::CellCount(cells.len()));
        }
        Ok(ColorMap { cells })
    }

    pub fn color(&self, cell: usize) -> Color {
        self.cells[cell]
    }

    pub fn cells(&self) -> &[Color] {
        &self.cells
    }

    /// Seeded random map. Red cells touching Green or Yellow are repainted
    /// Blue so that the map realizes the default color-transition relation,
    /// and every color is guaranteed to occur.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cells: Vec<Color> = (0..CELLS)
            .map(|_| Color::ALL[rng.gen_range(0..4)])
            .collect();
        // Plant one of each color away from each other before repairing.
        let anchors = [
            (1, 1, Color::Red),
            (1, 7, Color::Blue),
            (7, 1, Color::Green),
            (7, 7, Color::Yellow),
        ];
        for (r, c, color) in anchors {
            cells[r * SIDE + c] = color;
        }
        for (r, c, _) in anchors.iter().filter(|a| a.2 == Color::Red) {
            for n in neighbors(r * SIDE + c) {
                if matches!(cells[n], Color::Green | Color::Yellow) {
                    cells[n] = Color::Blue;
                }
            }
        }
        for cell in 0..CELLS {
            if cells[cell] == Color::Red
                && neighbors(cell).any(|n| matches!(cells[n], Color::Green | Color::Yellow))
            {
                cells[cell] = Color::Blue;
            }
        }
        ColorMap { cells }
    }

    /// Colors that can follow each other along one move (including staying).
    pub fn adjacency_transitions(&self) -> TransitionConstraint {
        let mut allowed = vec![vec![false; 4]; 4];
        for cell in 0..CELLS {
            let a = self.cells[cell].index();
            allowed[a][a] = true;
            for n in neighbors(cell) {
                allowed[a][self.cells[n].index()] = true;
            }
        }
        TransitionConstraint::from_matrix(allowed)
    }
}

/// Nine lines of nine letters from `R`, `B`, `G`, `Y`. Blank lines and
/// whitespace inside lines are ignored.
impl FromStr for ColorMap {
    type Err = GridError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut cells = Vec::with_capacity(CELLS);
        let rows = text
            .lines()
            .map(|l| l.split_whitespace().collect::<String>())
            .filter(|l| !l.is_empty());
        for (row, line) in rows.enumerate() {
            let len = line.chars().count();
            if len != SIDE {
                return Err(GridError::RowLength { row, len });
            }
            for (col, code) in line.chars().enumerate() {
                let color =
                    Color::from_letter(code).ok_or(GridError::UnknownColor { row, col, code })?;
                cells.push(color);
            }
        }
        ColorMap::new(cells)
    }
}

impl fmt::Display for ColorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.cells.chunks(SIDE) {
            let line: String = row.iter().map(|c| c.letter()).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn neighbors(cell: usize) -> impl Iterator<Item = usize> {
    Action::MOVES
        .into_iter()
        .map(move |a| a.apply(cell))
        .filter(move |&n| n != cell)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Action {
    Stay,
    North,
    South,
    East,
    West,
}

impl Action {
    pub const ALL: [Action; 5] = [
        Action::Stay,
        Action::North,
        Action::South,
        Action::East,
        Action::West,
    ];
    const MOVES: [Action; 4] = [Action::North, Action::South, Action::East, Action::West];

    /// Deterministic move; bumping into the boundary leaves the robot in place.
    pub fn apply(self, cell: usize) -> usize {
        let (r, c) = (cell / SIDE, cell % SIDE);
        let (r, c) = match self {
            Action::Stay => (r, c),
            Action::North => (r.saturating_sub(1), c),
            Action::South => ((r + 1).min(SIDE - 1), c),
            Action::East => (r, (c + 1).min(SIDE - 1)),
            Action::West => (r, c.saturating_sub(1)),
        };
        r * SIDE + c
    }
}

/// Default color-transition relation: Red may only be followed by Red or
/// Blue, Green only by Green, Yellow or Blue; Blue and Yellow are free.
pub fn default_transitions() -> TransitionConstraint {
    let mut t = TransitionConstraint::free(4);
    for to in [Color::Green, Color::Yellow] {
        t.forbid(Color::Red.index(), to.index());
    }
    t.forbid(Color::Green.index(), Color::Red.index());
    t
}

#[derive(Clone, Debug)]
pub struct Gridworld {
    map: ColorMap,
    transitions: TransitionConstraint,
}

impl Gridworld {
    pub fn new(map: ColorMap, transitions: TransitionConstraint) -> Self {
        Gridworld { map, transitions }
    }

    /// Map with the default transition relation.
    pub fn with_map(map: ColorMap) -> Self {
        Gridworld::new(map, default_transitions())
    }

    /// Seeded random map with the default transition relation.
    pub fn default_world() -> Self {
        Gridworld::with_map(ColorMap::random(0))
    }

    /// Transition relation read off the map's cell adjacency instead of the
    /// default rules.
    pub fn from_adjacency(map: ColorMap) -> Self {
        let t = map.adjacency_transitions();
        Gridworld::new(map, t)
    }

    pub fn map(&self) -> &ColorMap {
        &self.map
    }

    pub fn transitions(&self) -> &TransitionConstraint {
        &self.transitions
    }

    pub fn rollout(&self, start: usize, actions: &[Action]) -> Vec<usize> {
        let mut cells = vec![start];
        let mut cur = start;
        for a in actions {
            cur = a.apply(cur);
            cells.push(cur);
        }
        cells
    }

    /// Color observations of a cell sequence.
    pub fn observe(&self, cells: &[usize]) -> Vec<State> {
        cells.iter().map(|&c| self.map.color(c).state()).collect()
    }

    pub fn random_rollout<R: Rng>(&self, rng: &mut R, steps: usize) -> Vec<usize> {
        let start = rng.gen_range(0..CELLS);
        let actions: Vec<Action> = (0..steps)
            .map(|_| Action::ALL[rng.gen_range(0..5)])
            .collect();
        self.rollout(start, &actions)
    }
}
