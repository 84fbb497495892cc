use std::fmt;

use super::types::{CastlingRights, Color, Piece, PieceInstance, PieceKind, Square};

/// Why a set of pieces and metadata does not describe a chess position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetupError {
    #[error("expected exactly one {color} king, found {count}")]
    KingCount { color: Color, count: usize },
    #[error("pawn on back rank at {0}")]
    PawnOnBackRank(Square),
    #[error("{color} has {count} pieces, more than 16")]
    TooManyPieces { color: Color, count: usize },
    #[error("castling right {right} requires king and rook on their home squares")]
    StaleCastling { right: char },
    #[error("en passant square {0} is inconsistent with the board and side to move")]
    InvalidEnPassant(Square),
    #[error("fullmove number must be at least 1")]
    ZeroFullmove,
}

/// A complete chess position: placement plus the metadata an engine needs.
///
/// Values of this type always satisfy the structural invariants checked by
/// [`PositionState::validate`]; the only ways to build one are the FEN parser,
/// [`PositionState::new`] and the crate's own perturbation helpers, each of
/// which validates or preserves them.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PositionState {
    pub(crate) board: [Option<Piece>; 64],
    pub(crate) side_to_move: Color,
    pub(crate) castling: CastlingRights,
    pub(crate) en_passant: Option<Square>,
    pub(crate) halfmove_clock: u32,
    pub(crate) fullmove_number: u32,
}

impl PositionState {
    /// Builds and validates a position from a piece list. Later pieces on an
    /// occupied square replace earlier ones.
    pub fn new(
        pieces: impl IntoIterator<Item = PieceInstance>,
        side_to_move: Color,
        castling: CastlingRights,
        en_passant: Option<Square>,
        halfmove_clock: u32,
        fullmove_number: u32,
    ) -> Result<PositionState, SetupError> {
        let mut board = [None; 64];
        for p in pieces {
            board[p.square.index()] = Some(p.piece());
        }
        let pos = PositionState { board, side_to_move, castling, en_passant, halfmove_clock, fullmove_number };
        pos.validate()?;
        Ok(pos)
    }

    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.board[sq.index()]
    }

    /// All pieces in ascending square order.
    pub fn pieces(&self) -> impl Iterator<Item = PieceInstance> + '_ {
        Square::all().filter_map(move |sq| {
            self.board[sq.index()].map(|p| PieceInstance { kind: p.kind, color: p.color, square: sq })
        })
    }

    pub fn piece_count(&self) -> usize {
        self.board.iter().filter(|p| p.is_some()).count()
    }

    pub fn side_to_move(&self) -> Color {
        self.side_to_move
    }

    pub fn castling(&self) -> CastlingRights {
        self.castling
    }

    pub fn en_passant(&self) -> Option<Square> {
        self.en_passant
    }

    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    pub fn king_square(&self, color: Color) -> Option<Square> {
        Square::all().find(|&sq| self.board[sq.index()] == Some(Piece::new(color, PieceKind::King)))
    }

    /// Same placement and metadata with the move counters reset to `0 1`.
    pub fn with_zeroed_counters(&self) -> PositionState {
        PositionState { halfmove_clock: 0, fullmove_number: 1, ..self.clone() }
    }

    /// Same position with the other side to move and no en passant square.
    pub fn with_side_flipped(&self) -> PositionState {
        PositionState { side_to_move: self.side_to_move.opposite(), en_passant: None, ..self.clone() }
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), SetupError> {
        let mut kings = [0usize; 2];
        let mut counts = [0usize; 2];
        for p in self.pieces() {
            counts[p.color.index()] += 1;
            if p.kind == PieceKind::King {
                kings[p.color.index()] += 1;
            }
            if p.kind == PieceKind::Pawn && (p.square.rank() == 0 || p.square.rank() == 7) {
                return Err(SetupError::PawnOnBackRank(p.square));
            }
        }
        for color in [Color::White, Color::Black] {
            if kings[color.index()] != 1 {
                return Err(SetupError::KingCount { color, count: kings[color.index()] });
            }
            if counts[color.index()] > 16 {
                return Err(SetupError::TooManyPieces { color, count: counts[color.index()] });
            }
        }
        for ((flag, king, rook, color), right) in self.castling.requirements().into_iter().zip("KQkq".chars()) {
            if flag
                && (self.piece_at(king) != Some(Piece::new(color, PieceKind::King))
                    || self.piece_at(rook) != Some(Piece::new(color, PieceKind::Rook)))
            {
                return Err(SetupError::StaleCastling { right });
            }
        }
        if let Some(ep) = self.en_passant {
            if !self.en_passant_consistent(ep) {
                return Err(SetupError::InvalidEnPassant(ep));
            }
        }
        if self.fullmove_number == 0 {
            return Err(SetupError::ZeroFullmove);
        }
        Ok(())
    }

    /// The square of the pawn that just double-pushed past `ep`.
    pub(crate) fn en_passant_pawn_square(&self, ep: Square) -> Option<Square> {
        match self.side_to_move {
            Color::White if ep.rank() == 5 => ep.offset(0, -1),
            Color::Black if ep.rank() == 2 => ep.offset(0, 1),
            _ => None,
        }
    }

    fn en_passant_consistent(&self, ep: Square) -> bool {
        let Some(pawn_sq) = self.en_passant_pawn_square(ep) else {
            return false;
        };
        self.piece_at(ep).is_none()
            && self.piece_at(pawn_sq) == Some(Piece::new(self.side_to_move.opposite(), PieceKind::Pawn))
    }
}

impl fmt::Debug for PositionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PositionState({})", super::fen::to_fen(self))
    }
}

impl fmt::Display for PositionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::fen::to_fen(self))
    }
}
