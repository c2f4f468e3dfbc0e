//! Level-set rendering: shadow in black, lit in white, with the largest
//! cluster of each side recolored (red for shadow, blue for lit).

use shadowperc_core::alpha::{LevelSetMask, Side};
use shadowperc_core::clusters::{label_clusters, largest_cluster, Adjacency};

const BLACK: [u8; 3] = [0, 0, 0];
const WHITE: [u8; 3] = [255, 255, 255];
const RED: [u8; 3] = [255, 0, 0];
const BLUE: [u8; 3] = [0, 0, 255];

/// One pixel per cell, row-major RGB. Cells exactly at the level render
/// white but join neither highlighted cluster.
pub fn render_rgb(values: &[f64], width: u32, rows: u32, level: f64, mode: Adjacency) -> Vec<u8> {
    let shadow = LevelSetMask::from_values(values, width, rows, level, Side::Gt);
    let lit = LevelSetMask::from_values(values, width, rows, level, Side::Lt);
    let shadow_labels = label_clusters(&shadow, mode);
    let lit_labels = label_clusters(&lit, mode);
    let biggest_shadow = largest_cluster(&shadow_labels).map(|(label, _)| label);
    let biggest_lit = largest_cluster(&lit_labels).map(|(label, _)| label);

    let mut rgb = Vec::with_capacity(values.len() * 3);
    for j in 0..rows {
        for i in 0..width {
            let color = if shadow.get(i, j) {
                if Some(shadow_labels.label(i, j)) == biggest_shadow {
                    RED
                } else {
                    BLACK
                }
            } else if lit.get(i, j) && Some(lit_labels.label(i, j)) == biggest_lit {
                BLUE
            } else {
                WHITE
            };
            rgb.extend_from_slice(&color);
        }
    }
    rgb
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_slopes_at_their_level_render_white() {
        // Slope zero everywhere, level zero: boundary ties go white.
        let rgb = render_rgb(&[0.0; 9], 3, 3, 0.0, Adjacency::Orthogonal);
        assert_eq!(rgb.len(), 27);
        assert!(rgb.chunks(3).all(|p| p == WHITE));
    }

    #[test]
    fn deep_level_renders_one_red_cluster() {
        let rgb = render_rgb(&[0.0; 9], 3, 3, -1e9, Adjacency::Orthogonal);
        assert!(rgb.chunks(3).all(|p| p == RED));
    }

    #[test]
    fn split_field_highlights_both_sides() {
        // Left half above the level, right half below, on each of 2 rows.
        let values = [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let rgb = render_rgb(&values, 4, 2, 0.0, Adjacency::Orthogonal);
        let px: Vec<&[u8]> = rgb.chunks(3).collect();
        // Single shadow cluster -> all red; single lit cluster -> all blue.
        assert_eq!(px[0], RED);
        assert_eq!(px[1], RED);
        assert_eq!(px[2], BLUE);
        assert_eq!(px[3], BLUE);
    }
}
