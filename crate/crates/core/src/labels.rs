//! Vertex and face labels shared by the window, tiling and transform modules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which tiling a window set or patch belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    P3,
    P4,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::P3 => "p3",
            Family::P4 => "p4",
        })
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "p3" => Ok(Family::P3),
            "p4" => Ok(Family::P4),
            _ => Err(format!("unknown family {s:?} (expected p3 or p4)")),
        }
    }
}

/// Vertex environment (local star of rhombi).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Environment {
    D,
    Q,
    K,
    J,
    S1,
    S2,
    T,
    V,
    U,
    W,
}

impl Environment {
    pub const ALL: [Environment; 10] = [
        Environment::D,
        Environment::Q,
        Environment::K,
        Environment::J,
        Environment::S1,
        Environment::S2,
        Environment::T,
        Environment::V,
        Environment::U,
        Environment::W,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Environment::D => "D",
            Environment::Q => "Q",
            Environment::K => "K",
            Environment::J => "J",
            Environment::S1 => "S1",
            Environment::S2 => "S2",
            Environment::T => "T",
            Environment::V => "V",
            Environment::U => "U",
            Environment::W => "W",
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Vertex colour of the P4 tiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexColor {
    Uncolored,
    Orange,
    Blue,
    Yellow,
}

impl VertexColor {
    pub const ALL: [VertexColor; 4] =
        [VertexColor::Uncolored, VertexColor::Orange, VertexColor::Blue, VertexColor::Yellow];

    pub fn name(&self) -> &'static str {
        match self {
            VertexColor::Uncolored => "uncolored",
            VertexColor::Orange => "orange",
            VertexColor::Blue => "blue",
            VertexColor::Yellow => "yellow",
        }
    }
}

/// Colour sub-domains of the P4 windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ColorRegion {
    P1,
    B1,
    Y1,
    O2,
    O3,
    B4,
    Y4,
    P4,
}

impl ColorRegion {
    pub fn color(&self) -> VertexColor {
        match self {
            ColorRegion::B1 | ColorRegion::B4 | ColorRegion::P1 | ColorRegion::P4 => VertexColor::Blue,
            ColorRegion::Y1 | ColorRegion::Y4 => VertexColor::Yellow,
            ColorRegion::O2 | ColorRegion::O3 => VertexColor::Orange,
        }
    }
}

/// P4 prototile type. `A`–`C` are thick, `D`–`F` thin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrototileType {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl PrototileType {
    pub const ALL: [PrototileType; 6] =
        [PrototileType::A, PrototileType::B, PrototileType::C, PrototileType::D, PrototileType::E, PrototileType::F];

    pub fn index(&self) -> usize {
        *self as usize
    }

    pub fn is_thick(&self) -> bool {
        self.index() < 3
    }

    pub fn letter(&self) -> char {
        (b'a' + self.index() as u8) as char
    }
}

impl fmt::Display for PrototileType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}
