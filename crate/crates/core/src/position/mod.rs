//! Chess positions, the non-king piece features, and the ablation protocol.
//!
//! A perturbed position keeps both kings and any subset of the other pieces.
//! Castling and en passant metadata that the removed pieces supported is
//! dropped, and a position where the side not on move is in check gets one
//! chance to be repaired by handing the move to the other side.

mod attacks;
mod fen;
mod state;
mod types;

pub use attacks::{in_check, is_attacked};
pub use fen::{parse_fen, to_fen, FenError, FenField};
pub use state::{PositionState, SetupError};
pub use types::{CastlingRights, Color, InvalidSquare, Piece, PieceInstance, PieceKind, Square};

/// The largest number of non-king pieces a [`SubsetId`] can address.
pub const MAX_FEATURES: usize = 63;

/// The non-king pieces of a position in ascending square order. Position `i`
/// in this list is bit `i` of a [`SubsetId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceIndexing {
    pieces: Vec<PieceInstance>,
}

impl PieceIndexing {
    pub fn pieces(&self) -> &[PieceInstance] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&PieceInstance> {
        self.pieces.get(i)
    }

    pub fn full_subset(&self) -> SubsetId {
        SubsetId::full(self.len())
    }
}

pub fn non_king_indexing(position: &PositionState) -> PieceIndexing {
    PieceIndexing { pieces: position.pieces().filter(|p| p.kind != PieceKind::King).collect() }
}

/// A coalition of non-king pieces: bit `i` set means piece `i` of the
/// [`PieceIndexing`] stays on the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetId {
    mask: u64,
    len: u8,
}

impl SubsetId {
    /// # Panics
    ///
    /// If `len > 63` or `mask` has bits at or above `len`.
    pub fn new(mask: u64, len: usize) -> SubsetId {
        assert!(len <= MAX_FEATURES, "at most {MAX_FEATURES} features are supported");
        assert!(mask >> len == 0, "mask {mask:#x} has bits beyond {len} features");
        SubsetId { mask, len: len as u8 }
    }

    pub fn empty(len: usize) -> SubsetId {
        SubsetId::new(0, len)
    }

    pub fn full(len: usize) -> SubsetId {
        SubsetId::new((1u64 << len) - 1, len)
    }

    pub fn mask(self) -> u64 {
        self.mask
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.mask >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> SubsetId {
        SubsetId::new(self.mask | 1 << i, self.len())
    }

    pub fn without(self, i: usize) -> SubsetId {
        SubsetId::new(self.mask & !(1 << i), self.len())
    }

    pub fn count(self) -> usize {
        self.mask.count_ones() as usize
    }
}

/// Builds `x_S`: both kings, exactly the pieces selected by `subset`, and the
/// original metadata minus any castling right or en passant square whose
/// supporting piece was removed.
///
/// # Panics
///
/// If `subset` was not sized for this position's indexing.
pub fn build_subset_position(position: &PositionState, subset: SubsetId) -> PositionState {
    let indexing = non_king_indexing(position);
    build_subset_with(position, &indexing, subset)
}

/// [`build_subset_position`] with a precomputed indexing.
pub fn build_subset_with(position: &PositionState, indexing: &PieceIndexing, subset: SubsetId) -> PositionState {
    assert_eq!(subset.len(), indexing.len(), "subset size does not match the position");
    let mut out = position.clone();
    for (i, p) in indexing.pieces().iter().enumerate() {
        if !subset.contains(i) {
            out.board[p.square.index()] = None;
        }
    }

    let rook_present = |sq: Square, color: Color| out.piece_at(sq) == Some(Piece::new(color, PieceKind::Rook));
    let kept = [
        rook_present(Square::H1, Color::White),
        rook_present(Square::A1, Color::White),
        rook_present(Square::H8, Color::Black),
        rook_present(Square::A8, Color::Black),
    ];
    let c = &mut out.castling;
    c.white_kingside &= kept[0];
    c.white_queenside &= kept[1];
    c.black_kingside &= kept[2];
    c.black_queenside &= kept[3];

    if let Some(ep) = out.en_passant {
        let pawn = Piece::new(out.side_to_move.opposite(), PieceKind::Pawn);
        if out.en_passant_pawn_square(ep).and_then(|sq| out.piece_at(sq)) != Some(pawn) {
            out.en_passant = None;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegalityStatus {
    Legal,
    SideNotToMoveInCheck,
    StructurallyInvalid,
}

pub fn legality_status(position: &PositionState) -> LegalityStatus {
    if position.validate().is_err() {
        LegalityStatus::StructurallyInvalid
    } else if in_check(position, position.side_to_move().opposite()) {
        LegalityStatus::SideNotToMoveInCheck
    } else {
        LegalityStatus::Legal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairStatus {
    LegalAsIs,
    FlippedSideToMove,
    Unresolvable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub status: RepairStatus,
    /// The position to evaluate; the last candidate tried when unresolvable.
    pub position: PositionState,
}

/// Hands the move to the other side when the side not on move is in check.
/// Flipping also clears the en passant square.
pub fn repair(position: &PositionState) -> RepairOutcome {
    match legality_status(position) {
        LegalityStatus::Legal => RepairOutcome { status: RepairStatus::LegalAsIs, position: position.clone() },
        LegalityStatus::StructurallyInvalid => {
            RepairOutcome { status: RepairStatus::Unresolvable, position: position.clone() }
        }
        LegalityStatus::SideNotToMoveInCheck => {
            let flipped = position.with_side_flipped();
            let status = if legality_status(&flipped) == LegalityStatus::Legal {
                RepairStatus::FlippedSideToMove
            } else {
                RepairStatus::Unresolvable
            };
            RepairOutcome { status, position: flipped }
        }
    }
}
