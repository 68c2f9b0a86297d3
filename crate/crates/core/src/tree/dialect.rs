//! Text dialect for topological trees.
//!
//! ```text
//! tree := "L" | "(" tree ("," tree)+ ")"
//! ```
//!
//! An optional trailing `;` is accepted. ASCII whitespace between tokens is
//! skipped when reading and never written.

use super::{canonical_code, NodeId, TopTree, TreeBuilder, TreeError};

fn syntax(pos: usize, msg: impl Into<String>) -> TreeError {
    TreeError::Syntax {
        pos,
        msg: msg.into(),
    }
}

/// Parses one tree.
pub fn parse(text: &str) -> Result<TopTree, TreeError> {
    let bytes = text.as_bytes();
    let mut b = TreeBuilder::new();
    // one entry per open "(": byte offset of the paren and its children so far
    let mut open: Vec<(usize, Vec<NodeId>)> = Vec::new();
    let mut done: Option<NodeId> = None;
    // true when the next token must start a tree
    let mut want_tree = true;
    let mut pos = 0;

    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if done.is_some() {
            if c == b';' {
                pos += 1;
                if let Some(off) = bytes[pos..].iter().position(|c| !c.is_ascii_whitespace()) {
                    return Err(syntax(pos + off, "trailing input after ';'"));
                }
                break;
            }
            return Err(syntax(pos, "trailing input after tree"));
        }
        let finished = match c {
            b'L' if want_tree => {
                want_tree = false;
                Some(b.leaf())
            }
            b'(' if want_tree => {
                open.push((pos, Vec::new()));
                None
            }
            b',' if !want_tree && !open.is_empty() => {
                want_tree = true;
                None
            }
            b')' if !want_tree && !open.is_empty() => {
                let (start, kids) = open.pop().unwrap();
                if kids.len() < 2 {
                    return Err(TreeError::UnaryVertex { pos: start });
                }
                Some(b.node(&kids).expect("children were created by this parser"))
            }
            b'L' | b'(' => return Err(syntax(pos, "expected ',' or ')'")),
            b',' | b')' if want_tree => return Err(syntax(pos, "expected 'L' or '('")),
            b',' | b')' => return Err(syntax(pos, "unbalanced parenthesis")),
            _ => {
                let ch = text[pos..].chars().next().unwrap_or('?');
                return Err(syntax(pos, format!("unexpected character {ch:?}")));
            }
        };
        if let Some(id) = finished {
            match open.last_mut() {
                Some((_, kids)) => kids.push(id),
                None => done = Some(id),
            }
        }
        pos += 1;
    }

    match done {
        Some(root) => b.finish(root),
        None if open.is_empty() && want_tree => Err(syntax(pos, "empty input")),
        None => Err(syntax(pos, "unexpected end of input")),
    }
}

/// One non-comment line of a multi-tree file.
#[derive(Debug, Clone)]
pub struct ForestEntry {
    /// 1-based physical line number.
    pub line: usize,
    pub tree: Result<TopTree, TreeError>,
}

/// Parses a file holding one tree per line. Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_forest(text: &str) -> Vec<ForestEntry> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(ForestEntry {
                    line: i + 1,
                    tree: parse(t),
                })
            }
        })
        .collect()
}

/// Writes `tree` in the dialect, either in stored child order or as its
/// canonical code.
pub fn serialize(tree: &TopTree, canonical: bool) -> String {
    if canonical {
        return canonical_code(tree).into_string();
    }
    let mut out = String::new();
    let mut stack: Vec<(NodeId, usize)> = vec![(tree.root(), 0)];
    while let Some(top) = stack.last_mut() {
        let (id, next) = *top;
        let ch = tree.children(id);
        if ch.is_empty() {
            out.push('L');
            stack.pop();
            continue;
        }
        if next == ch.len() {
            out.push(')');
            stack.pop();
            continue;
        }
        out.push(if next == 0 { '(' } else { ',' });
        top.1 += 1;
        stack.push((ch[next], 0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_leaf_and_f2() {
        let t = parse("L").unwrap();
        assert!(t.is_single_vertex());
        let f2 = parse("((L,L),L)").unwrap();
        assert_eq!(f2.leaf_count(), 3);
        assert_eq!(f2.height(), 2);
        assert_eq!(serialize(&f2, false), "((L,L),L)");
    }

    #[test]
    fn whitespace_and_semicolon() {
        let t = parse("  ( L ,\n( L,L) ) ;  ").unwrap();
        assert_eq!(serialize(&t, false), "(L,(L,L))");
        assert!(parse("L;").is_ok());
    }

    #[test]
    fn unary_vertex_is_rejected() {
        assert_eq!(
            parse("((L),L)").unwrap_err(),
            TreeError::UnaryVertex { pos: 1 }
        );
        assert!(matches!(parse("(L)"), Err(TreeError::UnaryVertex { .. })));
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "", "   ", "(", "()", "(L,)", "(,L)", "L,L", "(L,L", "(L,L))", "LL", "x", "(L;L)",
            "L;L", "(L,L) L", "l",
        ] {
            let err = parse(bad).unwrap_err();
            assert!(
                matches!(err, TreeError::Syntax { .. }),
                "{bad:?} gave {err:?}"
            );
        }
    }

    #[test]
    fn canonical_serialization() {
        let f2 = parse("((L,L),L)").unwrap();
        assert_eq!(serialize(&f2, true), "(L,(L,L))");
        assert_eq!(serialize(&TopTree::leaf(), true), "L");
        assert_eq!(serialize(&TopTree::leaf(), false), "L");
    }

    #[test]
    fn forest_lines() {
        let text = "# header\nL\n\n  # indented comment\n((L,L),L)\n(L)\n";
        let entries = parse_forest(text);
        assert_eq!(entries.len(), 3);
        assert_eq!(entries[0].line, 2);
        assert_eq!(entries[1].line, 5);
        assert_eq!(entries[2].line, 6);
        assert!(entries[2].tree.is_err());
    }
}
