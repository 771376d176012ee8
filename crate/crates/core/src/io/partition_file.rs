//! Partition files: one 0-indexed block id per line, in vertex order.

use std::path::Path;

use crate::hypergraph::BlockId;

use super::{parse_error, parse_int, FormatResult};

/// Parses a partition of `n` vertices into `k` blocks. `%` comments and a
/// trailing blank line are tolerated.
pub fn parse_partition(text: &str, n: usize, k: usize) -> FormatResult<Vec<BlockId>> {
    let mut assignment = Vec::with_capacity(n);
    let mut last = 0;
    for (line, l) in super::content_lines(text) {
        last = line;
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        let b: BlockId = parse_int(l, line, "block id")?;
        if b >= k {
            return Err(parse_error(line, format!("block id {b} is not below k = {k}")));
        }
        assignment.push(b);
    }
    if assignment.len() != n {
        return Err(parse_error(
            last.max(1),
            format!("expected {n} block ids, found {}", assignment.len()),
        ));
    }
    Ok(assignment)
}

pub fn read_partition(path: impl AsRef<Path>, n: usize, k: usize) -> FormatResult<Vec<BlockId>> {
    parse_partition(&std::fs::read_to_string(path)?, n, k)
}

pub fn format_partition(assignment: &[BlockId]) -> String {
    let mut out = String::with_capacity(assignment.len() * 3);
    for b in assignment {
        out.push_str(&b.to_string());
        out.push('\n');
    }
    out
}

pub fn write_partition(assignment: &[BlockId], path: impl AsRef<Path>) -> FormatResult<()> {
    std::fs::write(path, format_partition(assignment))?;
    Ok(())
}
