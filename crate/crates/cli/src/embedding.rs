//! Embedding files: `{"order": [v, ...], "pages": {"<edge id>": page}}`
//! with edge ids in parse order.

use std::collections::HashMap;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use twopage::oracle::BookEmbedding;

#[derive(Deserialize)]
struct EmbeddingFile {
    order: Vec<usize>,
    pages: HashMap<String, u8>,
}

/// Serialize with edge ids in increasing order.
pub fn embedding_to_json(emb: &BookEmbedding) -> String {
    let order = serde_json::to_string(&emb.order).expect("plain integers");
    let pages: Vec<String> = emb.pages.iter().enumerate().map(|(e, p)| format!("\"{e}\":{p}")).collect();
    format!("{{\"order\":{order},\"pages\":{{{}}}}}\n", pages.join(","))
}

/// Parse an embedding file for a graph with `m` edges; every edge needs a
/// page.
pub fn embedding_from_json(text: &str, m: usize) -> Result<BookEmbedding> {
    let file: EmbeddingFile = serde_json::from_str(text).context("parsing embedding JSON")?;
    let mut pages = vec![0u8; m];
    for (k, p) in &file.pages {
        let e: usize = k.parse().with_context(|| format!("edge id `{k}` is not a number"))?;
        if e >= m {
            bail!("edge id {e} out of range for {m} edges");
        }
        pages[e] = *p;
    }
    if let Some(e) = pages.iter().position(|&p| p == 0) {
        bail!("edge {e} has no page (pages are numbered from 1)");
    }
    Ok(BookEmbedding { order: file.order, pages })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let emb = BookEmbedding { order: vec![2, 0, 1], pages: vec![1, 2, 1] };
        let text = embedding_to_json(&emb);
        assert_eq!(text, "{\"order\":[2,0,1],\"pages\":{\"0\":1,\"1\":2,\"2\":1}}\n");
        assert_eq!(embedding_from_json(&text, 3).unwrap(), emb);
    }

    #[test]
    fn missing_page_is_an_error() {
        assert!(embedding_from_json("{\"order\":[0,1],\"pages\":{}}", 1).is_err());
        assert!(embedding_from_json("{\"order\":[0,1],\"pages\":{\"3\":1}}", 1).is_err());
    }
}
