//! Process-algebra workbench: a PSF-style specification language with
//! labelled-transition semantics, equivalence checking, architecture
//! refinement, constraining, ToolBus script generation and a simulator.

pub mod constrain;
pub mod equiv;
pub mod kernel;
pub mod levels;
pub mod refine;
pub mod scriptgen;
pub mod sim;
pub mod syntax;
