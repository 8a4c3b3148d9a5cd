//! One-dimensional BV functions, profiles `ℓ` and their radius `r_ℓ`.

mod function;
mod profile;

pub use function::{
    BVFunction, CantorAtom, CantorPiece, Decomposition, JumpAtom, Orientation, Piece, JUMP_TOLERANCE,
};
pub use profile::{unit_ball_volume, Profile, RadiusProfile};
