//! Structured-reply parsing.
//!
//! Line-oriented prefix matching: the first line starting with "Reasoning:"
//! supplies the reasoning, the first line starting with "Response:" supplies
//! the verdict. Anything without an explicit yes/no verdict defaults to "No"
//! and is marked nonconforming. Total: never fails on any input.

use super::context::DecisionOutcome;

fn strip_prefix_ci<'a>(line: &'a str, prefix: &str) -> Option<&'a str> {
    let line = line.trim_start();
    let (lb, pb) = (line.as_bytes(), prefix.as_bytes());
    // the prefix is ASCII, so a case-insensitive byte match guarantees the
    // split lands on a char boundary
    if lb.len() >= pb.len() && lb[..pb.len()].eq_ignore_ascii_case(pb) {
        Some(&line[pb.len()..])
    } else {
        None
    }
}

/// Parse a raw reply into a decision outcome.
pub fn parse_response(raw: &str) -> DecisionOutcome {
    let mut reasoning: Option<String> = None;
    let mut verdict: Option<Option<bool>> = None;

    for line in raw.lines() {
        if reasoning.is_none() {
            if let Some(rest) = strip_prefix_ci(line, "Reasoning:") {
                reasoning = Some(rest.trim().to_owned());
            }
        }
        if verdict.is_none() {
            if let Some(rest) = strip_prefix_ci(line, "Response:") {
                let token = rest
                    .split_whitespace()
                    .next()
                    .map(|t| t.trim_matches(|c: char| !c.is_ascii_alphanumeric()));
                verdict = Some(match token {
                    Some(t) if t.eq_ignore_ascii_case("yes") => Some(true),
                    Some(t) if t.eq_ignore_ascii_case("no") => Some(false),
                    _ => None,
                });
            }
        }
        if reasoning.is_some() && verdict.is_some() {
            break;
        }
    }

    let reasoning = reasoning.unwrap_or_default();
    match verdict.flatten() {
        Some(stay_home) => DecisionOutcome::conforming(stay_home, reasoning, raw.to_owned()),
        None => DecisionOutcome::nonconforming(reasoning, raw.to_owned()),
    }
}
