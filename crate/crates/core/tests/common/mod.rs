//! Helpers shared by the integration tests: random positions and oracles
//! written independently of the library's own move-generation code.

#![allow(dead_code)]

use pieceshap::position::{CastlingRights, Color, PieceInstance, PieceKind, PositionState, Square};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BETA: f64 = 3.68e-3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn square(i: usize) -> Square {
    Square::from_index(i as u8).unwrap()
}

/// Kings plus `n` random non-king pieces, structurally valid but not
/// necessarily legal. Castling and en passant are set when the board allows.
pub fn random_setup(rng: &mut ChaCha8Rng, n: usize) -> PositionState {
    const KINDS: [PieceKind; 5] =
        [PieceKind::Pawn, PieceKind::Knight, PieceKind::Bishop, PieceKind::Rook, PieceKind::Queen];
    loop {
        let mut free: Vec<usize> = (0..64).collect();
        // kings on their home squares now and then so castling shows up
        let wk = if rng.random_bool(0.3) { 4 } else { take(&mut free, rng, &|_| true).unwrap() };
        free.retain(|&f| f != wk);
        let bk = if rng.random_bool(0.3) && wk != 60 && !adjacent(wk, 60) {
            60
        } else {
            take(&mut free, rng, &|s| !adjacent(wk, s)).unwrap()
        };
        free.retain(|&f| f != bk);
        let mut pieces = vec![
            PieceInstance { square: square(wk), kind: PieceKind::King, color: Color::White },
            PieceInstance { square: square(bk), kind: PieceKind::King, color: Color::Black },
        ];
        let mut counts = [1usize, 1];
        for _ in 0..n {
            let color = if rng.random_bool(0.5) { Color::White } else { Color::Black };
            let color = if counts[color.index()] >= 16 { color.opposite() } else { color };
            counts[color.index()] += 1;
            let kind = *KINDS.choose(rng).unwrap();
            let s = if kind == PieceKind::Pawn {
                take(&mut free, rng, &|s| (8..56).contains(&s))
            } else if kind == PieceKind::Rook && rng.random_bool(0.3) {
                let homes: &[usize] = if color == Color::White { &[0, 7] } else { &[56, 63] };
                take(&mut free, rng, &|s| homes.contains(&s)).or_else(|| take(&mut free, rng, &|_| true))
            } else {
                take(&mut free, rng, &|_| true)
            };
            pieces.push(PieceInstance { square: square(s.unwrap()), kind, color });
        }
        let side = if rng.random_bool(0.5) { Color::White } else { Color::Black };

        let base = PositionState::new(pieces.clone(), side, CastlingRights::NONE, None, 0, 1).unwrap();
        let castling = random_castling(rng, &base);
        let ep = random_en_passant(rng, &base);
        let halfmove = rng.random_range(0..50);
        let fullmove = rng.random_range(1..80);
        if let Ok(p) = PositionState::new(pieces, side, castling, ep, halfmove, fullmove) {
            return p;
        }
    }
}

/// Like [`random_setup`] but with the side not on move out of check.
pub fn random_legal(rng: &mut ChaCha8Rng, n: usize) -> PositionState {
    loop {
        let p = random_setup(rng, n);
        if !oracle_in_check(&p, p.side_to_move().opposite()) {
            return p;
        }
    }
}

fn random_castling(rng: &mut ChaCha8Rng, p: &PositionState) -> CastlingRights {
    let has = |sq: usize, kind: PieceKind, color: Color| {
        p.piece_at(square(sq)).is_some_and(|x| x.kind == kind && x.color == color)
    };
    let wk = has(4, PieceKind::King, Color::White);
    let bk = has(60, PieceKind::King, Color::Black);
    CastlingRights {
        white_kingside: wk && has(7, PieceKind::Rook, Color::White) && rng.random_bool(0.8),
        white_queenside: wk && has(0, PieceKind::Rook, Color::White) && rng.random_bool(0.8),
        black_kingside: bk && has(63, PieceKind::Rook, Color::Black) && rng.random_bool(0.8),
        black_queenside: bk && has(56, PieceKind::Rook, Color::Black) && rng.random_bool(0.8),
    }
}

fn random_en_passant(rng: &mut ChaCha8Rng, p: &PositionState) -> Option<Square> {
    // the pawn that just moved two squares belongs to the side not on move
    let (pawn_rank, ep_rank, behind_rank) = match p.side_to_move() {
        Color::White => (4, 5, 6),
        Color::Black => (3, 2, 1),
    };
    let mover = p.side_to_move().opposite();
    let candidates: Vec<u8> = (0..8)
        .filter(|&f| {
            p.piece_at(Square::new(f, pawn_rank).unwrap())
                .is_some_and(|x| x.kind == PieceKind::Pawn && x.color == mover)
                && p.piece_at(Square::new(f, ep_rank).unwrap()).is_none()
                && p.piece_at(Square::new(f, behind_rank).unwrap()).is_none()
        })
        .collect();
    if candidates.is_empty() || !rng.random_bool(0.5) {
        return None;
    }
    Some(Square::new(*candidates.choose(rng).unwrap(), ep_rank).unwrap())
}

fn take(free: &mut Vec<usize>, rng: &mut ChaCha8Rng, ok: &dyn Fn(usize) -> bool) -> Option<usize> {
    let candidates: Vec<usize> = free.iter().copied().filter(|&s| ok(s)).collect();
    let s = *candidates.choose(rng)?;
    free.retain(|&f| f != s);
    Some(s)
}

fn adjacent(a: usize, b: usize) -> bool {
    let (fa, ra) = ((a % 8) as i32, (a / 8) as i32);
    let (fb, rb) = ((b % 8) as i32, (b / 8) as i32);
    (fa - fb).abs() <= 1 && (ra - rb).abs() <= 1
}

/// Every square attacked by the piece on `from`, found by walking the board
/// outwards from the attacker.
pub fn oracle_attacks_from(p: &PositionState, from: usize) -> [bool; 64] {
    let mut hit = [false; 64];
    let Some(piece) = p.piece_at(square(from)) else {
        return hit;
    };
    let (f, r) = ((from % 8) as i32, (from / 8) as i32);
    let on_board = |f: i32, r: i32| (0..8).contains(&f) && (0..8).contains(&r);
    let mut mark = |f: i32, r: i32| {
        if on_board(f, r) {
            hit[(r * 8 + f) as usize] = true;
        }
    };
    let steps: &[(i32, i32)] = match piece.kind {
        PieceKind::Pawn => {
            let dr = if piece.color == Color::White { 1 } else { -1 };
            mark(f - 1, r + dr);
            mark(f + 1, r + dr);
            return hit;
        }
        PieceKind::Knight => &[(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)],
        PieceKind::King => &[(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)],
        _ => &[],
    };
    for &(df, dr) in steps {
        mark(f + df, r + dr);
    }
    let mut rays: Vec<(i32, i32)> = Vec::new();
    if matches!(piece.kind, PieceKind::Rook | PieceKind::Queen) {
        rays.extend([(1, 0), (-1, 0), (0, 1), (0, -1)]);
    }
    if matches!(piece.kind, PieceKind::Bishop | PieceKind::Queen) {
        rays.extend([(1, 1), (1, -1), (-1, 1), (-1, -1)]);
    }
    for (df, dr) in rays {
        let (mut x, mut y) = (f + df, r + dr);
        while on_board(x, y) {
            mark(x, y);
            if p.piece_at(square((y * 8 + x) as usize)).is_some() {
                break;
            }
            x += df;
            y += dr;
        }
    }
    hit
}

/// Whether `color`'s king is attacked, checking every (attacker, target)
/// pair on the board.
pub fn oracle_in_check(p: &PositionState, color: Color) -> bool {
    let king = p.king_square(color).unwrap().index();
    (0..64).any(|from| p.piece_at(square(from)).is_some_and(|x| x.color != color) && oracle_attacks_from(p, from)[king])
}

pub fn logistic(cp: f64) -> f64 {
    1.0 / (1.0 + (-BETA * cp).exp())
}

pub fn material_value(kind: PieceKind, knight: i32) -> i32 {
    match kind {
        PieceKind::Pawn => 100,
        PieceKind::Knight => knight,
        PieceKind::Bishop => 300,
        PieceKind::Rook => 500,
        PieceKind::Queen => 900,
        PieceKind::King => 0,
    }
}

/// Non-king pieces in ascending square order.
pub fn non_kings(p: &PositionState) -> Vec<PieceInstance> {
    p.pieces().filter(|x| x.kind != PieceKind::King).collect()
}

/// Kings plus the pieces selected by `mask`; side to move kept.
pub fn oracle_subset(p: &PositionState, mask: u64) -> Vec<PieceInstance> {
    let kings = p.pieces().filter(|x| x.kind == PieceKind::King);
    let chosen = non_kings(p).into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x);
    kings.chain(chosen).collect()
}

/// Whether the coalition leaves both kings in check, so that no choice of
/// side to move makes it legal.
pub fn both_in_check(p: &PositionState, mask: u64) -> bool {
    let board = PositionState::new(oracle_subset(p, mask), Color::White, CastlingRights::NONE, None, 0, 1).unwrap();
    oracle_in_check(&board, Color::White) && oracle_in_check(&board, Color::Black)
}

/// `f(x_S)` for the material evaluator, computed from scratch: 0.5 for the
/// bare kings or when both kings stand in check, else the logistic of the
/// material balance.
pub fn oracle_material_value(p: &PositionState, mask: u64, knight: i32) -> f64 {
    if mask == 0 || both_in_check(p, mask) {
        return 0.5;
    }
    let balance: i32 = oracle_subset(p, mask)
        .iter()
        .map(|x| {
            let v = material_value(x.kind, knight);
            if x.color == Color::White {
                v
            } else {
                -v
            }
        })
        .sum();
    logistic(balance as f64)
}

/// Whether some coalition leaves both kings in check.
pub fn has_unresolvable_subset(p: &PositionState) -> bool {
    let n = non_kings(p).len();
    (1..1u64 << n).any(|m| both_in_check(p, m))
}

/// Shapley values as the average marginal contribution over all `n!`
/// orderings, with `value` called on coalition masks.
pub fn permutation_oracle(n: usize, value: impl Fn(u64) -> f64) -> Vec<f64> {
    let mut memo = std::collections::HashMap::new();
    let mut v = |m: u64| *memo.entry(m).or_insert_with(|| value(m));
    let mut sums = vec![0.0; n];
    let mut count = 0usize;
    let mut order: Vec<usize> = (0..n).collect();
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut walk = |order: &[usize], sums: &mut [f64]| {
        let mut mask = 0u64;
        for &i in order {
            let before = v(mask);
            mask |= 1 << i;
            sums[i] += v(mask) - before;
        }
    };
    walk(&order, &mut sums);
    count += 1;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            walk(&order, &mut sums);
            count += 1;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    sums.into_iter().map(|s| s / count as f64).collect()
}
