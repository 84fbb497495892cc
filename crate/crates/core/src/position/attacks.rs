use super::state::PositionState;
use super::types::{Color, Piece, PieceKind, Square};

const KNIGHT_STEPS: [(i8, i8); 8] = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)];
const KING_STEPS: [(i8, i8); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
const ORTHOGONAL: [(i8, i8); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
const DIAGONAL: [(i8, i8); 4] = [(1, 1), (-1, 1), (-1, -1), (1, -1)];

/// Whether any piece of `by` attacks `target`. Works backwards from the
/// target: each movement pattern is walked outward and matched against the
/// piece found there.
pub fn is_attacked(position: &PositionState, target: Square, by: Color) -> bool {
    let holds = |sq: Square, kind: PieceKind| position.piece_at(sq) == Some(Piece::new(by, kind));

    // A pawn of `by` attacks diagonally forward, so look one rank behind.
    let pawn_dr = match by {
        Color::White => -1,
        Color::Black => 1,
    };
    if [-1, 1].into_iter().filter_map(|df| target.offset(df, pawn_dr)).any(|sq| holds(sq, PieceKind::Pawn)) {
        return true;
    }
    if KNIGHT_STEPS.iter().filter_map(|&(df, dr)| target.offset(df, dr)).any(|sq| holds(sq, PieceKind::Knight)) {
        return true;
    }
    if KING_STEPS.iter().filter_map(|&(df, dr)| target.offset(df, dr)).any(|sq| holds(sq, PieceKind::King)) {
        return true;
    }
    let slider_hit = |dirs: &[(i8, i8)], kind: PieceKind| {
        dirs.iter().any(|&(df, dr)| {
            let mut sq = target;
            while let Some(next) = sq.offset(df, dr) {
                sq = next;
                if let Some(p) = position.piece_at(sq) {
                    return p.color == by && (p.kind == kind || p.kind == PieceKind::Queen);
                }
            }
            false
        })
    };
    slider_hit(&ORTHOGONAL, PieceKind::Rook) || slider_hit(&DIAGONAL, PieceKind::Bishop)
}

/// Whether `color`'s king is attacked. `false` if that king is missing.
pub fn in_check(position: &PositionState, color: Color) -> bool {
    position.king_square(color).is_some_and(|k| is_attacked(position, k, color.opposite()))
}
