//! Forsyth–Edwards Notation.
//!
//! Both the 6-field form and the 4-field form (move counters omitted, read as
//! `0 1`) are accepted. Output is always the 6-field form.

use std::fmt;

use super::state::{PositionState, SetupError};
use super::types::{CastlingRights, Color, Piece, Square};

/// The FEN field a syntax error was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FenField {
    Record,
    Placement,
    SideToMove,
    Castling,
    EnPassant,
    HalfmoveClock,
    FullmoveNumber,
}

impl fmt::Display for FenField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FenField::Record => "record",
            FenField::Placement => "piece placement (field 1)",
            FenField::SideToMove => "side to move (field 2)",
            FenField::Castling => "castling rights (field 3)",
            FenField::EnPassant => "en passant square (field 4)",
            FenField::HalfmoveClock => "halfmove clock (field 5)",
            FenField::FullmoveNumber => "fullmove number (field 6)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FenError {
    #[error("malformed FEN in {field}: {reason}")]
    MalformedFen { field: FenField, reason: String },
    #[error("illegal setup: {0}")]
    IllegalSetup(#[from] SetupError),
}

fn malformed(field: FenField, reason: impl Into<String>) -> FenError {
    FenError::MalformedFen { field, reason: reason.into() }
}

pub fn parse_fen(text: &str) -> Result<PositionState, FenError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 4 && fields.len() != 6 {
        return Err(malformed(
            FenField::Record,
            format!("expected 4 or 6 space-separated fields, found {}", fields.len()),
        ));
    }

    let board = parse_placement(fields[0])?;

    let side_to_move = match fields[1] {
        "w" => Color::White,
        "b" => Color::Black,
        other => return Err(malformed(FenField::SideToMove, format!("expected 'w' or 'b', found {other:?}"))),
    };

    let castling = parse_castling(fields[2])?;

    let en_passant = match fields[3] {
        "-" => None,
        s => Some(
            s.parse::<Square>()
                .map_err(|_| malformed(FenField::EnPassant, format!("expected '-' or a square, found {s:?}")))?,
        ),
    };

    let (halfmove_clock, fullmove_number) = if fields.len() == 6 {
        let half = fields[4]
            .parse::<u32>()
            .map_err(|_| malformed(FenField::HalfmoveClock, format!("not a count: {:?}", fields[4])))?;
        let full = fields[5]
            .parse::<u32>()
            .map_err(|_| malformed(FenField::FullmoveNumber, format!("not a count: {:?}", fields[5])))?;
        (half, full)
    } else {
        (0, 1)
    };

    let pos = PositionState { board, side_to_move, castling, en_passant, halfmove_clock, fullmove_number };
    pos.validate()?;
    Ok(pos)
}

fn parse_placement(field: &str) -> Result<[Option<Piece>; 64], FenError> {
    let ranks: Vec<&str> = field.split('/').collect();
    if ranks.len() != 8 {
        return Err(malformed(FenField::Placement, format!("expected 8 ranks, found {}", ranks.len())));
    }
    let mut board = [None; 64];
    for (i, rank_text) in ranks.iter().enumerate() {
        let rank = 7 - i as u8;
        let mut file = 0u8;
        for c in rank_text.chars() {
            if let Some(d) = c.to_digit(10) {
                if d == 0 || d > 8 {
                    return Err(malformed(FenField::Placement, format!("bad empty-square count '{c}'")));
                }
                file += d as u8;
            } else if let Some(piece) = Piece::from_fen_char(c) {
                if file >= 8 {
                    return Err(malformed(FenField::Placement, format!("rank {} is longer than 8 squares", rank + 1)));
                }
                board[(rank * 8 + file) as usize] = Some(piece);
                file += 1;
            } else {
                return Err(malformed(FenField::Placement, format!("unexpected character '{c}'")));
            }
            if file > 8 {
                return Err(malformed(FenField::Placement, format!("rank {} is longer than 8 squares", rank + 1)));
            }
        }
        if file != 8 {
            return Err(malformed(FenField::Placement, format!("rank {} covers {file} squares, not 8", rank + 1)));
        }
    }
    Ok(board)
}

fn parse_castling(field: &str) -> Result<CastlingRights, FenError> {
    let mut rights = CastlingRights::NONE;
    if field == "-" {
        return Ok(rights);
    }
    for c in field.chars() {
        let flag = match c {
            'K' => &mut rights.white_kingside,
            'Q' => &mut rights.white_queenside,
            'k' => &mut rights.black_kingside,
            'q' => &mut rights.black_queenside,
            _ => return Err(malformed(FenField::Castling, format!("unexpected character '{c}'"))),
        };
        if *flag {
            return Err(malformed(FenField::Castling, format!("repeated right '{c}'")));
        }
        *flag = true;
    }
    Ok(rights)
}

/// Canonical 6-field FEN.
pub fn to_fen(position: &PositionState) -> String {
    let mut out = String::with_capacity(90);
    for rank in (0..8u8).rev() {
        let mut empty = 0;
        for file in 0..8u8 {
            match position.board[(rank * 8 + file) as usize] {
                Some(p) => {
                    if empty > 0 {
                        out.push(char::from(b'0' + empty));
                        empty = 0;
                    }
                    out.push(p.fen_char());
                }
                None => empty += 1,
            }
        }
        if empty > 0 {
            out.push(char::from(b'0' + empty));
        }
        if rank > 0 {
            out.push('/');
        }
    }
    out.push(' ');
    out.push(match position.side_to_move {
        Color::White => 'w',
        Color::Black => 'b',
    });
    out.push(' ');
    if position.castling.is_empty() {
        out.push('-');
    } else {
        let c = position.castling;
        for (flag, letter) in
            [(c.white_kingside, 'K'), (c.white_queenside, 'Q'), (c.black_kingside, 'k'), (c.black_queenside, 'q')]
        {
            if flag {
                out.push(letter);
            }
        }
    }
    out.push(' ');
    match position.en_passant {
        Some(sq) => out.push_str(&sq.to_string()),
        None => out.push('-'),
    }
    out.push_str(&format!(" {} {}", position.halfmove_clock, position.fullmove_number));
    out
}
