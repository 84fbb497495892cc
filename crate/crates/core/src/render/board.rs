use std::fmt::Write;

use super::color::{ColorScale, TINT_OPACITY};
use crate::attribution::Explanation;
use crate::position::{to_fen, Color, PieceKind, Square};

const SQUARE: u32 = 60;
const MARGIN: u32 = 24;
const LIGHT: &str = "#f0d9b5";
const DARK: &str = "#b58863";

fn glyph(kind: PieceKind, color: Color) -> char {
    match (color, kind) {
        (Color::White, PieceKind::King) => '♔',
        (Color::White, PieceKind::Queen) => '♕',
        (Color::White, PieceKind::Rook) => '♖',
        (Color::White, PieceKind::Bishop) => '♗',
        (Color::White, PieceKind::Knight) => '♘',
        (Color::White, PieceKind::Pawn) => '♙',
        (Color::Black, PieceKind::King) => '♚',
        (Color::Black, PieceKind::Queen) => '♛',
        (Color::Black, PieceKind::Rook) => '♜',
        (Color::Black, PieceKind::Bishop) => '♝',
        (Color::Black, PieceKind::Knight) => '♞',
        (Color::Black, PieceKind::Pawn) => '♟',
    }
}

/// Top-left corner of a square, White at the bottom.
fn corner(sq: Square) -> (u32, u32) {
    (MARGIN + sq.file() as u32 * SQUARE, MARGIN + (7 - sq.rank() as u32) * SQUARE)
}

/// An 8×8 SVG board with every attributed piece's square tinted by its
/// contribution. Kings are drawn but never tinted.
pub fn to_svg_board(e: &Explanation, scale: &ColorScale) -> String {
    let size = 8 * SQUARE + 2 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(svg, "<title>{}</title>", to_fen(&e.position));
    let _ = writeln!(svg, r##"<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>"##);

    for sq in Square::all() {
        let (x, y) = corner(sq);
        let fill = if (sq.file() + sq.rank()) % 2 == 0 { DARK } else { LIGHT };
        let _ = writeln!(svg, r#"<rect x="{x}" y="{y}" width="{SQUARE}" height="{SQUARE}" fill="{fill}"/>"#);
    }

    for c in &e.contributions {
        let (x, y) = corner(c.piece.square);
        let tint = scale.color_for_phi(c.phi);
        let _ = writeln!(
            svg,
            r#"<rect class="tint" data-square="{sq}" x="{x}" y="{y}" width="{SQUARE}" height="{SQUARE}" fill="{tint}" fill-opacity="{TINT_OPACITY}"><title>{label} {phi:+.4}</title></rect>"#,
            sq = c.piece.square,
            label = c.piece,
            phi = c.phi,
        );
    }

    for p in e.position.pieces() {
        let (x, y) = corner(p.square);
        let _ = writeln!(
            svg,
            r#"<text x="{cx}" y="{cy}" font-size="{fs}" text-anchor="middle" dominant-baseline="central">{g}</text>"#,
            cx = x + SQUARE / 2,
            cy = y + SQUARE / 2,
            fs = SQUARE * 4 / 5,
            g = glyph(p.kind, p.color),
        );
    }

    for i in 0..8u32 {
        let file = (b'a' + i as u8) as char;
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y}" font-size="14" text-anchor="middle">{file}</text>"#,
            x = MARGIN + i * SQUARE + SQUARE / 2,
            y = size - MARGIN / 3,
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y}" font-size="14" text-anchor="middle" dominant-baseline="central">{rank}</text>"#,
            x = MARGIN / 2,
            y = MARGIN + (7 - i) * SQUARE + SQUARE / 2,
            rank = i + 1,
        );
    }
    svg.push_str("</svg>\n");
    svg
}
