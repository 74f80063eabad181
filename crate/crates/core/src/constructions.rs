//! A one-line language for naming p-groups, and builders that realize each
//! construction as a [`GroupTable`].
//!
//! ```text
//! spec := term { "x" term }
//! term := "C(" q ")" | "EA(" p "," r ")" | "Ab(" p ",[" m {"," m} "])"
//!       | "ES+(" p ")" | "M(" p "," k ")" | "SD(" p "," m "," k "," u ")"
//!       | "perm:" path | "table:" path
//! ```
//!
//! `M(p,k)` is shorthand for `SD(p, k-1, 1, 1+p^(k-2))`, the nonabelian group
//! of order `p^k` with a cyclic subgroup of index `p`.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::arith;
use crate::group::{self, GroupError, GroupTable, Permutation, DEFAULT_ELEMENT_CAP};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {msg}")]
    FileFormat {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    /// Cyclic group of prime-power order `q` (`q = 1` is the trivial group).
    Cyclic(u64),
    /// `C(p^m1) x C(p^m2) x ...` for the listed exponents.
    Abelian(u64, Vec<u32>),
    ElemAbelian(u64, u32),
    /// Extraspecial group of order `p^3` and exponent `p` (for odd `p`).
    ExtraspecialExpP(u64),
    Modular(u64, u32),
    /// `<a, b | a^(p^m) = b^(p^k) = 1, b a b^-1 = a^u>`.
    SemidirectCyclic {
        p: u64,
        m: u32,
        k: u32,
        u: u64,
    },
    Product(Box<GroupSpec>, Box<GroupSpec>),
    PermFile(PathBuf),
    TableFile(PathBuf),
}

impl GroupSpec {
    /// The prime of the construction, when it is determined by the text alone.
    pub fn prime(&self) -> Option<u64> {
        match self {
            GroupSpec::Cyclic(q) => arith::prime_power(*q).map(|(p, _)| p),
            GroupSpec::Abelian(p, _)
            | GroupSpec::ElemAbelian(p, _)
            | GroupSpec::ExtraspecialExpP(p)
            | GroupSpec::Modular(p, _)
            | GroupSpec::SemidirectCyclic { p, .. } => Some(*p),
            GroupSpec::Product(a, b) => a.prime().or_else(|| b.prime()),
            GroupSpec::PermFile(_) | GroupSpec::TableFile(_) => None,
        }
    }

    /// Expands `Modular` into the equivalent `SemidirectCyclic`.
    pub fn desugar(&self) -> GroupSpec {
        match self {
            GroupSpec::Modular(p, k) => GroupSpec::SemidirectCyclic {
                p: *p,
                m: k - 1,
                k: 1,
                u: 1 + p.pow(k - 2),
            },
            GroupSpec::Product(a, b) => {
                GroupSpec::Product(Box::new(a.desugar()), Box::new(b.desugar()))
            }
            other => other.clone(),
        }
    }

    fn validate(&self) -> Result<(), SpecError> {
        let bad = |msg: String| Err(SpecError::BadParameter(msg));
        let need_prime = |p: u64| {
            if arith::is_prime(p) {
                Ok(())
            } else {
                Err(SpecError::BadParameter(format!("{p} is not a prime")))
            }
        };
        match self {
            GroupSpec::Cyclic(q) => {
                if *q != 1 && arith::prime_power(*q).is_none() {
                    return bad(format!("C({q}): {q} is not a prime power"));
                }
            }
            GroupSpec::Abelian(p, exps) => {
                need_prime(*p)?;
                if exps.contains(&0) {
                    return bad("Ab: exponents must be positive".into());
                }
            }
            GroupSpec::ElemAbelian(p, r) => {
                need_prime(*p)?;
                if *r == 0 {
                    return bad("EA: rank must be positive".into());
                }
            }
            GroupSpec::ExtraspecialExpP(p) => need_prime(*p)?,
            GroupSpec::Modular(p, k) => {
                need_prime(*p)?;
                if *k < 3 {
                    return bad(format!("M({p},{k}): k must be at least 3"));
                }
            }
            GroupSpec::SemidirectCyclic { p, m, k, u } => {
                need_prime(*p)?;
                if *m == 0 {
                    return bad("SD: m must be positive".into());
                }
                let modulus = checked_pow(*p, *m)?;
                let order_b = checked_pow(*p, *k)?;
                if arith::gcd(*u, *p) != 1 {
                    return bad(format!("SD: {u} is not a unit modulo {modulus}"));
                }
                if arith::pow_mod(*u, order_b, modulus) != 1 % modulus {
                    return bad(format!("SD: {u}^{order_b} is not 1 modulo {modulus}"));
                }
                if *k > 0 && *u % modulus == 1 % modulus {
                    return bad(format!("SD: {u} acts trivially modulo {modulus}"));
                }
            }
            GroupSpec::Product(a, b) => {
                a.validate()?;
                b.validate()?;
                if let (Some(x), Some(y)) = (a.prime(), b.prime()) {
                    if x != y {
                        return Err(GroupError::PrimeMismatch(x, y).into());
                    }
                }
            }
            GroupSpec::PermFile(_) | GroupSpec::TableFile(_) => {}
        }
        Ok(())
    }
}

fn checked_pow(p: u64, e: u32) -> Result<u64, SpecError> {
    p.checked_pow(e)
        .ok_or_else(|| SpecError::BadParameter(format!("{p}^{e} overflows")))
}

impl fmt::Display for GroupSpec {
    /// Canonical text, re-parseable by [`parse_spec`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(q) => write!(f, "C({q})"),
            GroupSpec::Abelian(p, exps) => {
                let list: Vec<String> = exps.iter().map(u32::to_string).collect();
                write!(f, "Ab({p},[{}])", list.join(","))
            }
            GroupSpec::ElemAbelian(p, r) => write!(f, "EA({p},{r})"),
            GroupSpec::ExtraspecialExpP(p) => write!(f, "ES+({p})"),
            GroupSpec::Modular(p, k) => write!(f, "M({p},{k})"),
            GroupSpec::SemidirectCyclic { p, m, k, u } => write!(f, "SD({p},{m},{k},{u})"),
            GroupSpec::Product(a, b) => write!(f, "{a} x {b}"),
            GroupSpec::PermFile(path) => write!(f, "perm:{}", path.display()),
            GroupSpec::TableFile(path) => write!(f, "table:{}", path.display()),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SpecError> {
        Err(SpecError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), SpecError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn int(&mut self) -> Result<u64, SpecError> {
        self.skip_ws();
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return self.err("expected an integer");
        }
        let text = &self.rest()[..digits];
        let value = text
            .parse::<u64>()
            .or_else(|_| self.err(format!("integer `{text}` is too large")))?;
        self.pos += digits;
        Ok(value)
    }

    fn small(&mut self) -> Result<u32, SpecError> {
        let v = self.int()?;
        u32::try_from(v).or_else(|_| self.err(format!("{v} is too large")))
    }

    fn path(&mut self) -> Result<PathBuf, SpecError> {
        self.skip_ws();
        let len = self
            .rest()
            .find(char::is_whitespace)
            .unwrap_or(self.rest().len());
        if len == 0 {
            return self.err("expected a path");
        }
        let path = PathBuf::from(&self.rest()[..len]);
        self.pos += len;
        Ok(path)
    }

    fn term(&mut self) -> Result<GroupSpec, SpecError> {
        self.skip_ws();
        // longer keywords first so `ES+(` is not read as something shorter
        if self.eat("perm:") {
            return Ok(GroupSpec::PermFile(self.path()?));
        }
        if self.eat("table:") {
            return Ok(GroupSpec::TableFile(self.path()?));
        }
        if self.eat("ES+(") {
            let p = self.int()?;
            self.expect(")")?;
            return Ok(GroupSpec::ExtraspecialExpP(p));
        }
        if self.eat("EA(") {
            let p = self.int()?;
            self.expect(",")?;
            let r = self.small()?;
            self.expect(")")?;
            return Ok(GroupSpec::ElemAbelian(p, r));
        }
        if self.eat("Ab(") {
            let p = self.int()?;
            self.expect(",")?;
            self.expect("[")?;
            let mut exps = vec![self.small()?];
            while self.eat(",") {
                exps.push(self.small()?);
            }
            self.expect("]")?;
            self.expect(")")?;
            return Ok(GroupSpec::Abelian(p, exps));
        }
        if self.eat("SD(") {
            let p = self.int()?;
            self.expect(",")?;
            let m = self.small()?;
            self.expect(",")?;
            let k = self.small()?;
            self.expect(",")?;
            let u = self.int()?;
            self.expect(")")?;
            return Ok(GroupSpec::SemidirectCyclic { p, m, k, u });
        }
        if self.eat("M(") {
            let p = self.int()?;
            self.expect(",")?;
            let k = self.small()?;
            self.expect(")")?;
            return Ok(GroupSpec::Modular(p, k));
        }
        if self.eat("C(") {
            let q = self.int()?;
            self.expect(")")?;
            return Ok(GroupSpec::Cyclic(q));
        }
        self.err("expected a group term")
    }
}

/// Parses and validates a group specification.
pub fn parse_spec(text: &str) -> Result<GroupSpec, SpecError> {
    let mut parser = Parser { src: text, pos: 0 };
    let mut spec = parser.term()?;
    while parser.eat("x") {
        let rhs = parser.term()?;
        spec = GroupSpec::Product(Box::new(spec), Box::new(rhs));
    }
    parser.skip_ws();
    if parser.pos != text.len() {
        return parser.err("unexpected trailing input");
    }
    spec.validate()?;
    Ok(spec)
}

/// Builds the group named by `spec` with the default element cap.
pub fn build(spec: &GroupSpec) -> Result<GroupTable, SpecError> {
    build_with_cap(spec, DEFAULT_ELEMENT_CAP)
}

pub fn build_with_cap(spec: &GroupSpec, cap: usize) -> Result<GroupTable, SpecError> {
    spec.validate()?;
    let close = |gens: &[Permutation], p: u64| GroupTable::close(gens, Some(p), cap);
    Ok(match spec.desugar() {
        GroupSpec::Cyclic(q) => match arith::prime_power(q) {
            None => GroupTable::trivial(None),
            Some((p, _)) => close(&[cycle_on(0, q as usize, q as usize)], p)?,
        },
        GroupSpec::Abelian(p, exps) => {
            let lens: Vec<usize> = exps
                .iter()
                .map(|&m| checked_pow(p, m).map(|q| q as usize))
                .collect::<Result<_, _>>()?;
            close(&disjoint_cycles(&lens), p)?
        }
        GroupSpec::ElemAbelian(p, r) => close(&disjoint_cycles(&vec![p as usize; r as usize]), p)?,
        GroupSpec::ExtraspecialExpP(p) => close(&heisenberg_generators(p as usize), p)?,
        GroupSpec::SemidirectCyclic { p, m, k, u } => {
            close(&semidirect_generators(p, m, k, u)?, p)?
        }
        GroupSpec::Product(a, b) => {
            let ga = build_with_cap(&a, cap)?;
            let gb = build_with_cap(&b, cap)?;
            if ga.order().saturating_mul(gb.order()) > cap {
                return Err(GroupError::SizeLimit { cap }.into());
            }
            group::direct_product(&ga, &gb)?
        }
        GroupSpec::PermFile(path) => {
            let gens = read_perm_file(&path)?;
            GroupTable::close(&gens, None, cap)?
        }
        GroupSpec::TableFile(path) => read_table_file(&path, cap)?,
        GroupSpec::Modular(..) => unreachable!("desugared"),
    })
}

fn cycle_on(offset: usize, len: usize, degree: usize) -> Permutation {
    Permutation::from_cycles(degree, &[(offset..offset + len).collect()]).expect("valid cycle")
}

fn disjoint_cycles(lens: &[usize]) -> Vec<Permutation> {
    let degree: usize = lens.iter().sum();
    let mut offset = 0;
    lens.iter()
        .map(|&len| {
            let c = cycle_on(offset, len, degree);
            offset += len;
            c
        })
        .collect()
}

/// Right regular representation of the group of triples over `Z/p` with
/// `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y')`; generators `a`, `b`, `c`.
fn heisenberg_generators(p: usize) -> Vec<Permutation> {
    let code = |x: usize, y: usize, z: usize| x + p * y + p * p * z;
    let right_mult = |gx: usize, gy: usize, gz: usize| {
        let mut images = vec![0; p * p * p];
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    images[code(x, y, z)] = code((x + gx) % p, (y + gy) % p, (z + gz + x * gy) % p);
                }
            }
        }
        Permutation::from_images(images).expect("regular action is a bijection")
    };
    vec![
        right_mult(1, 0, 0),
        right_mult(0, 1, 0),
        right_mult(0, 0, 1),
    ]
}

/// `a` is a `p^m`-cycle on the first block; `b` multiplies that block by
/// `u^-1` (so that `b a b^-1 = a^u` with left-to-right products) and cycles a
/// second block of `p^k` points, which keeps the action faithful.
fn semidirect_generators(p: u64, m: u32, k: u32, u: u64) -> Result<Vec<Permutation>, SpecError> {
    let n = checked_pow(p, m)? as usize;
    let l = checked_pow(p, k)? as usize;
    let degree = n + if l > 1 { l } else { 0 };
    let a = cycle_on(0, n, degree);
    let u_inv = arith::inverse_mod(u, n as u64)
        .ok_or_else(|| SpecError::BadParameter(format!("{u} is not a unit modulo {n}")))?
        as usize;
    let mut images: Vec<usize> = (0..degree).collect();
    for (i, img) in images.iter_mut().enumerate().take(n) {
        *img = i * u_inv % n;
    }
    if l > 1 {
        for i in 0..l {
            images[n + i] = n + (i + 1) % l;
        }
    }
    let b = Permutation::from_images(images)?;
    Ok(vec![a, b])
}

/// Reads generators in 1-based disjoint-cycle notation, one per line.
/// Blank lines and `#` comments are ignored.
pub fn read_perm_file(path: &Path) -> Result<Vec<Permutation>, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_perm_text(&text).map_err(|(line, msg)| SpecError::FileFormat {
        path: path.to_path_buf(),
        line,
        msg,
    })
}

/// Parses generator lines; errors carry a 1-based line number.
pub fn parse_perm_text(text: &str) -> Result<Vec<Permutation>, (usize, String)> {
    let mut cycle_lists: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    let mut degree = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let mut cycles = Vec::new();
        let mut rest = line;
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or((lineno, format!("expected `(` in `{line}`")))?;
            let close = body
                .find(')')
                .ok_or((lineno, format!("unclosed cycle in `{line}`")))?;
            let mut cycle = Vec::new();
            for tok in body[..close].split(|c: char| c == ',' || c.is_whitespace()) {
                if tok.is_empty() {
                    continue;
                }
                let point: usize = tok
                    .parse()
                    .map_err(|_| (lineno, format!("bad point `{tok}`")))?;
                if point == 0 {
                    return Err((lineno, "points are 1-based".into()));
                }
                degree = degree.max(point);
                cycle.push(point - 1);
            }
            cycles.push(cycle);
            rest = body[close + 1..].trim_start();
        }
        cycle_lists.push((lineno, cycles));
    }
    cycle_lists
        .into_iter()
        .map(|(lineno, cycles)| {
            Permutation::from_cycles(degree, &cycles).map_err(|e| (lineno, e.to_string()))
        })
        .collect()
}

/// Reads a multiplication table: `order N` followed by `N` rows of `N`
/// 0-based indices, row `i` column `j` holding the index of `i*j`.
pub fn read_table_file(path: &Path, cap: usize) -> Result<GroupTable, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file_err = |line: usize, msg: String| SpecError::FileFormat {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let table = parse_table_text(&text).map_err(|(line, msg)| file_err(line, msg))?;
    group_from_table(&table, cap).map_err(|msg| match msg {
        TableError::Group(e) => SpecError::Group(e),
        TableError::Invalid(m) => file_err(0, m),
    })
}

pub fn parse_table_text(text: &str) -> Result<Vec<Vec<usize>>, (usize, String)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().ok_or((1, "empty table file".to_string()))?;
    let n: usize = header
        .strip_prefix("order")
        .and_then(|s| s.trim().parse().ok())
        .ok_or((1, format!("expected `order N`, found `{header}`")))?;
    let mut rows = Vec::with_capacity(n);
    for (lineno, line) in lines {
        let row: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| (lineno, format!("bad entry `{t}`"))))
            .collect::<Result<_, _>>()?;
        if row.len() != n {
            return Err((lineno, format!("expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err((0, format!("expected {n} rows, found {}", rows.len())));
    }
    Ok(rows)
}

#[derive(Debug)]
pub enum TableError {
    Invalid(String),
    Group(GroupError),
}

/// Validates a Cayley table and realizes it by its right regular
/// representation. Element `i` of the table is element `i` of the result.
pub fn group_from_table(table: &[Vec<usize>], cap: usize) -> Result<GroupTable, TableError> {
    let n = table.len();
    if n == 0 {
        return Err(TableError::Invalid("empty table".into()));
    }
    if n > cap {
        return Err(TableError::Group(GroupError::SizeLimit { cap }));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n || row.iter().any(|&x| x >= n) {
            return Err(TableError::Invalid(format!("row {i} is malformed")));
        }
        if row[0] != i || table[0][i] != i {
            return Err(TableError::Invalid("element 0 is not the identity".into()));
        }
    }
    // each row and each column must be a permutation
    let right: Vec<Permutation> = (0..n)
        .map(|g| {
            let images = table.iter().map(|row| row[g]).collect();
            Permutation::from_images(images)
                .map_err(|_| TableError::Invalid(format!("column {g} repeats an entry")))
        })
        .collect::<Result<_, _>>()?;
    for (i, row) in table.iter().enumerate() {
        Permutation::from_images(row.clone())
            .map_err(|_| TableError::Invalid(format!("row {i} repeats an entry")))?;
    }
    // associativity against a generating set (Light's test)
    let mut gens = Vec::new();
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut count = 1;
    for g in 1..n {
        if count == n {
            break;
        }
        if reached[g] {
            continue;
        }
        gens.push(g);
        let mut frontier: Vec<usize> = (0..n).filter(|&x| reached[x]).collect();
        while let Some(x) = frontier.pop() {
            for &h in &gens {
                let y = table[x][h];
                if !reached[y] {
                    reached[y] = true;
                    count += 1;
                    frontier.push(y);
                }
            }
        }
    }
    for &g in &gens {
        for x in 0..n {
            for y in 0..n {
                if table[table[x][g]][y] != table[x][table[g][y]] {
                    return Err(TableError::Invalid(format!(
                        "multiplication is not associative at ({x}, {g}, {y})"
                    )));
                }
            }
        }
    }
    // right regular action: point x goes to x*g; composing in order matches i*j
    let gen_perms: Vec<Permutation> = gens.iter().map(|&g| right[g].clone()).collect();
    let closed = GroupTable::close_on(n, &gen_perms, None, cap).map_err(TableError::Group)?;
    if closed.order() != n {
        return Err(TableError::Invalid(
            "table does not describe a group".into(),
        ));
    }
    // keep the file's numbering
    Ok(closed.reordered(right))
}
