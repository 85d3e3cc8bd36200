use thiserror::Error;

use crate::dart::Dart;
use crate::map::MapError;
use crate::pyramid::KernelState;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PyramidError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("level {level} is out of range (top level is {top})")]
    LevelOutOfRange { level: usize, top: usize },
    #[error("dart {dart} does not survive at level {level}")]
    DeadDart { dart: Dart, level: usize },
    #[error("dart {0} appears twice in the kernel")]
    DuplicateDart(Dart),
    #[error("expected a {expected:?} kernel next, got {got:?}")]
    KernelOrder { expected: KernelState, got: KernelState },
    #[error("kernel is not closed under alpha at dart {0}")]
    NotAlphaClosed(Dart),
    #[error("contraction kernel contains the self-loop of dart {0}")]
    ContractedSelfLoop(Dart),
    #[error("contraction kernel closes a cycle at dart {0}")]
    ContractedCycle(Dart),
    #[error("dart {0} is not part of an empty self-loop")]
    NotEmptySelfLoop(Dart),
    #[error("dart {0} is not incident to a degree-2 dual vertex")]
    NotDoubleEdge(Dart),
    #[error("kernel would delete every dart of the vertex of {0}")]
    VertexRemoved(Dart),
    #[error("level {level} still holds a redundant edge at dart {dart}")]
    RedundantEdges { level: usize, dart: Dart },
    #[error("dart {0} is not a vertex representative at this level")]
    InvalidVertex(Dart),
    #[error("sequence is not sigma-consecutive at position {0}")]
    NotSigmaConsecutive(usize),
    #[error("sequence does not define a closed boundary")]
    NotClosed,
    #[error("undefined angle (U-turn) after dart {0}")]
    UndefinedAngle(Dart),
    #[error("loop partner of dart {0} is not on the stack top: map is not planar")]
    NonPlanar(Dart),
    #[error("corrupted pyramid: {0}")]
    Corrupt(String),
    #[error("invalid pyramid record: {0}")]
    Format(String),
}

pub type Result<T, E = PyramidError> = std::result::Result<T, E>;
