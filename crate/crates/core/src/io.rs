//! Text formats: hypergraphs are "n r" on the first line followed by one
//! edge per line of space-separated 1-based labels; '#' starts a comment.

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut header: Option<(u32, u32)> = None;
    let mut edges: Vec<Vec<u32>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let nums: Vec<u32> = fields
            .iter()
            .map(|f| {
                f.parse::<u32>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("expected an integer, found '{f}'"),
                })
            })
            .collect::<Result<_>>()?;
        match header {
            None => {
                if nums.len() != 2 {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: "header must be 'n r'".to_string(),
                    });
                }
                header = Some((nums[0], nums[1]));
            }
            Some(_) => edges.push(nums),
        }
    }
    let (n, r) = header.ok_or(Error::Parse {
        line: 0,
        message: "empty input".to_string(),
    })?;
    Hypergraph::build(n, r, &edges)
}

pub fn render_hypergraph(graph: &Hypergraph) -> String {
    let mut out = format!(
        "{} {}\n",
        graph.vertices().last().copied().unwrap_or(0),
        graph.uniformity()
    );
    for e in graph.edges() {
        let labels: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        out.push_str(&labels.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let text = "# a triangle on six labels\n6 2\n1 2\n2 3\n1 3 # last\n";
        let g = parse_hypergraph(text).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.vertex_count(), 6);
        let again = parse_hypergraph(&render_hypergraph(&g)).unwrap();
        assert_eq!(again.edge_count(), 3);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_hypergraph(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_hypergraph("3\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_hypergraph("3 2\n1 x\n"),
            Err(Error::Parse { .. })
        ));
    }
}
