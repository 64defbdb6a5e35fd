//! Arc diagram of a book embedding: the spine is a horizontal line, page 1
//! arcs sit above it and page 2 arcs below. Further pages alternate sides
//! with growing stroke dash so they stay distinguishable.

use std::fmt::Write;

use anyhow::{bail, Result};
use twopage::oracle::{verify_embedding, BookEmbedding};
use twopage::MultiGraph;

const GAP: f64 = 48.0;
const MARGIN: f64 = 32.0;
const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub fn render_svg(g: &MultiGraph, emb: &BookEmbedding, pages: usize) -> Result<String> {
    if !verify_embedding(g, emb, pages) {
        bail!("refusing to render an invalid {pages}-page embedding");
    }
    let n = g.n();
    let mut pos = vec![0usize; n];
    for (i, &v) in emb.order.iter().enumerate() {
        pos[v] = i;
    }
    let span = (0..g.m()).map(|e| {
        let (a, b) = g.endpoints(e);
        pos[a].abs_diff(pos[b])
    });
    let reach = span.max().unwrap_or(0) as f64 * GAP / 2.0;
    let width = 2.0 * MARGIN + GAP * n.saturating_sub(1) as f64;
    let height = 2.0 * (MARGIN + reach);
    let spine_y = MARGIN + reach;
    let x = |i: usize| MARGIN + GAP * i as f64;

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#)?;
    writeln!(out, r#"  <line x1="{:.1}" y1="{spine_y:.1}" x2="{:.1}" y2="{spine_y:.1}" stroke="black" stroke-width="1.5"/>"#, MARGIN / 2.0, width - MARGIN / 2.0)?;
    for e in 0..g.m() {
        let (a, b) = g.endpoints(e);
        let (i, j) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
        let page = emb.pages[e] as usize;
        let r = (x(j) - x(i)) / 2.0;
        // Odd pages above the spine, even pages below.
        let sweep = if page % 2 == 1 { 1 } else { 0 };
        let colour = COLOURS[(page - 1) % COLOURS.len()];
        let dash = if page > 2 { format!(r#" stroke-dasharray="{}""#, 2 * (page - 2)) } else { String::new() };
        writeln!(
            out,
            r#"  <path d="M {:.1} {spine_y:.1} A {r:.1} {r:.1} 0 0 {sweep} {:.1} {spine_y:.1}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}><title>edge {e} page {page}</title></path>"#,
            x(i),
            x(j)
        )?;
    }
    for (i, &v) in emb.order.iter().enumerate() {
        writeln!(out, r#"  <circle cx="{:.1}" cy="{spine_y:.1}" r="4" fill="black"/>"#, x(i))?;
        writeln!(out, r#"  <text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{v}</text>"#, x(i) + 8.0, spine_y + 14.0)?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use twopage::gen;

    #[test]
    fn triangle_arcs_above() {
        let g = gen::cycle(3);
        let emb = BookEmbedding { order: vec![0, 1, 2], pages: vec![1, 1, 1] };
        let svg = render_svg(&g, &emb, 2).unwrap();
        assert_eq!(svg.matches(" 0 0 1 ").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn empty_graph_has_only_points() {
        let g = MultiGraph::new(3);
        let emb = BookEmbedding { order: vec![0, 1, 2], pages: vec![] };
        let svg = render_svg(&g, &emb, 2).unwrap();
        assert_eq!(svg.matches("<path").count(), 0);
        assert_eq!(svg.matches("<text").count(), 3);
    }

    #[test]
    fn refuses_crossings() {
        let g = gen::complete(4);
        let emb = BookEmbedding { order: vec![0, 1, 2, 3], pages: vec![1; 6] };
        assert!(render_svg(&g, &emb, 2).is_err());
    }
}
