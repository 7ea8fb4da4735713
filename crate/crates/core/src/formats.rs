//! Plain-text formats for matrices, codes and solutions.
//!
//! Blank lines and lines starting with `#` are ignored. A matrix block is a
//! line `rows cols q` followed by `rows` lines of `cols` integers. A code file
//! starts with `code n k delta alpha q count` followed by `count` matrix
//! blocks (one basis per codeword). A solution file starts with
//! `solution h r alpha ell epsilon q t` followed by `r` matrix blocks.
//! Fields are named by their order `q`; the modulus is always the
//! lexicographically smallest monic irreducible.

use std::fmt::Write as _;

use thiserror::Error;

use crate::combnet::{LinearSolution, NetworkParams};
use crate::ffield::FieldSpec;
use crate::grassmann::CoveringCode;
use crate::linalg::{Matrix, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unexpected end of input: {0}")]
    Truncated(String),
    #[error("invalid parameters: {0}")]
    Params(String),
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Content lines with 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), FormatError> {
        for (i, line) in self.inner.by_ref() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Ok((i + 1, line.split_whitespace().collect()));
        }
        Err(FormatError::Truncated(format!("expected {what}")))
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        match self.next_line("nothing") {
            Ok((line, _)) => Err(err(line, "trailing content")),
            Err(_) => Ok(()),
        }
    }
}

fn numbers(line: usize, tokens: &[&str], expected: usize, what: &str) -> Result<Vec<u64>, FormatError> {
    if tokens.len() != expected {
        return Err(err(
            line,
            format!("{what}: expected {expected} numbers, found {}", tokens.len()),
        ));
    }
    tokens
        .iter()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| err(line, format!("{what}: `{t}` is not a non-negative integer")))
        })
        .collect()
}

fn keyword_header(
    lines: &mut Lines<'_>,
    keyword: &str,
    fields: usize,
) -> Result<(usize, Vec<u64>), FormatError> {
    let (line, tokens) = lines.next_line(&format!("`{keyword}` header"))?;
    if tokens.first() != Some(&keyword) {
        return Err(err(line, format!("expected header starting with `{keyword}`")));
    }
    let values = numbers(line, &tokens[1..], fields, &format!("{keyword} header"))?;
    Ok((line, values))
}

fn field_at(line: usize, q: u64) -> Result<FieldSpec, FormatError> {
    FieldSpec::from_order(q).map_err(|e| err(line, e.to_string()))
}

fn read_matrix(lines: &mut Lines<'_>, expect_field: Option<&FieldSpec>) -> Result<Matrix, FormatError> {
    let (line, tokens) = lines.next_line("matrix header `rows cols q`")?;
    let head = numbers(line, &tokens, 3, "matrix header")?;
    let (rows, cols) = (head[0] as usize, head[1] as usize);
    let field = field_at(line, head[2])?;
    if let Some(f) = expect_field {
        if *f != field {
            return Err(err(line, format!("matrix over GF({}), expected GF({})", field.q(), f.q())));
        }
    }
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line, tokens) = lines.next_line("matrix row")?;
        for v in numbers(line, &tokens, cols, "matrix row")? {
            if v >= u64::from(field.q()) {
                return Err(err(line, format!("entry {v} is outside GF({})", field.q())));
            }
            data.push(v as u32);
        }
    }
    Matrix::from_flat(&field, rows, cols, data).map_err(|e| err(line, e.to_string()))
}

fn push_matrix(out: &mut String, m: &Matrix) {
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), m.field().q());
    for row in m.to_rows() {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
}

fn push_comments(out: &mut String, header: &[String]) {
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
}

pub fn write_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    push_matrix(&mut out, m);
    out
}

pub fn parse_matrix(text: &str) -> Result<Matrix, FormatError> {
    let mut lines = Lines::new(text);
    let m = read_matrix(&mut lines, None)?;
    lines.finish()?;
    Ok(m)
}

/// Serializes a code; `header` lines are written as `#` comments.
pub fn write_code(code: &CoveringCode, header: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, header);
    let _ = writeln!(
        out,
        "code {} {} {} {} {} {}",
        code.n(),
        code.k(),
        code.delta(),
        code.alpha(),
        code.field().q(),
        code.len()
    );
    for c in code.codewords() {
        push_matrix(&mut out, c.basis());
    }
    out
}

/// Parses a code file. Codeword blocks may be any generating set; each is
/// reduced to its row space.
pub fn parse_code(text: &str) -> Result<CoveringCode, FormatError> {
    let mut lines = Lines::new(text);
    let (line, h) = keyword_header(&mut lines, "code", 6)?;
    let field = field_at(line, h[4])?;
    let (n, k, delta, alpha, count) = (
        h[0] as usize,
        h[1] as usize,
        h[2] as usize,
        h[3] as usize,
        h[5] as usize,
    );
    let mut codewords = Vec::with_capacity(count);
    for _ in 0..count {
        let m = read_matrix(&mut lines, Some(&field))?;
        codewords.push(Subspace::from_generators(&m));
    }
    lines.finish()?;
    CoveringCode::new(&field, n, k, delta, alpha, codewords).map_err(|e| err(line, e.to_string()))
}

pub fn write_solution(sol: &LinearSolution, header: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, header);
    let p = sol.params();
    let _ = writeln!(
        out,
        "solution {} {} {} {} {} {} {}",
        p.h,
        p.r,
        p.alpha,
        p.ell,
        p.epsilon,
        sol.field().q(),
        sol.t()
    );
    for a in sol.matrices() {
        push_matrix(&mut out, a);
    }
    out
}

pub fn parse_solution(text: &str) -> Result<LinearSolution, FormatError> {
    let mut lines = Lines::new(text);
    let (line, h) = keyword_header(&mut lines, "solution", 7)?;
    let params = NetworkParams::new(h[0] as usize, h[1] as usize, h[2] as usize, h[3] as usize, h[4] as usize)
        .map_err(|e| err(line, e.to_string()))?;
    let field = field_at(line, h[5])?;
    let t = h[6] as usize;
    let mut matrices = Vec::with_capacity(params.r);
    for _ in 0..params.r {
        matrices.push(read_matrix(&mut lines, Some(&field))?);
    }
    lines.finish()?;
    LinearSolution::new(params, &field, t, matrices).map_err(|e| err(line, e.to_string()))
}

/// Network parameters as a JSON object `{h, r, alpha, ell, epsilon}`.
pub fn parse_params_json(text: &str) -> Result<NetworkParams, FormatError> {
    let p: NetworkParams = serde_json::from_str(text).map_err(|e| err(e.line(), e.to_string()))?;
    p.validate().map_err(|e| FormatError::Params(e.to_string()))?;
    Ok(p)
}

pub fn params_to_json(p: &NetworkParams) -> String {
    serde_json::to_string(p).expect("plain struct serializes")
}
