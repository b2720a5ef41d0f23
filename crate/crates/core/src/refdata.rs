//! Published reference results compiled into the crate: the table of fields
//! with `h < 16` up to `m = 10⁷`, the small-class-number lists by index and
//! conductor shape, and a handful of fixed sets used as oracles.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, Factorization};
use crate::field::discriminant_base;

const TABLES_TXT: &str = include_str!("../data/reference_tables.txt");
const LISTS_TXT: &str = include_str!("../data/small_class_lists.txt");

/// `(table id, h, number of rows)`.
pub const TABLE_SHAPE: [(u8, u64, usize); 7] =
    [(1, 1, 26), (2, 3, 31), (3, 4, 11), (4, 7, 10), (5, 9, 36), (6, 12, 21), (7, 13, 3)];
pub const TABLE_ROWS: usize = 138;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RefDataError {
    #[error("{file}:{line}: {msg}")]
    Parse { file: &'static str, line: usize, msg: String },
    #[error("{file}:{line}: m = {m}: {msg}")]
    Invariant { file: &'static str, line: usize, m: i64, msg: String },
    #[error("{0}")]
    Count(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcase {
    PrimeF,
    CompositeF,
    NineP,
    NineS,
}

impl Subcase {
    pub const ALL: [Subcase; 4] = [Subcase::PrimeF, Subcase::CompositeF, Subcase::NineP, Subcase::NineS];

    pub fn as_str(self) -> &'static str {
        match self {
            Subcase::PrimeF => "prime_f",
            Subcase::CompositeF => "composite_f",
            Subcase::NineP => "nine_p",
            Subcase::NineS => "nine_s",
        }
    }
}

impl fmt::Display for Subcase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Subcase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Subcase::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown subcase `{s}` (expected prime_f, composite_f, nine_p or nine_s)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub table: u8,
    pub m: i64,
    pub h: u64,
    pub factorization: Factorization,
    pub mod27: u8,
}

/// One printed row of the small-class-number lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListRow {
    pub index: u32,
    pub subcase: Subcase,
    pub m: i64,
    /// `D / d`, `d` being 1, 9 or 27 by index and subcase.
    pub value: u128,
    pub h: u64,
}

impl ListRow {
    pub fn divisor(&self) -> u128 {
        list_divisor(self.index, self.subcase)
    }
}

pub fn list_divisor(index: u32, subcase: Subcase) -> u128 {
    match (index, subcase) {
        (1, Subcase::PrimeF | Subcase::CompositeF) => 1,
        (1, _) => 9,
        _ => 27,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSets {
    /// All `−1 ≤ m < n` with `L_m = L_n`.
    pub coincidence_pairs: Vec<(i64, i64)>,
    /// Each class of coinciding `m` with its common conductor.
    pub coincidence_classes: Vec<(Vec<i64>, u128)>,
    /// Monogenic fields of prime conductor with `h < 16`, by `h`.
    pub prime_conductor_small_h: Vec<(u64, Vec<i64>)>,
    /// Index-27 fields of prime conductor with `h < 43`, by `h`; includes `m = 12`.
    pub index27_small_h: Vec<(u64, Vec<i64>)>,
    /// `(index, subcase, rows)` of the lists with `h ≤ 1000`.
    pub list_counts: Vec<(u32, Subcase, usize)>,
    /// Totals per index including the special rows `m = 0` and `m = 3`.
    pub list_totals: Vec<(u32, usize)>,
    pub allowed_h_below_43: Vec<u64>,
    /// Extra solutions of `F_1(x, y) = 5`.
    pub extra_solutions_m1: Vec<(i64, i64)>,
}

impl ReferenceSets {
    /// The six solutions of `F_m(x, y) = 2m + 3` present for every `m`.
    pub fn generic_solutions(m: i64) -> [(i64, i64); 6] {
        [(-1, -1), (-1, 2), (2, -1), (-m - 1, -1), (-1, m + 2), (m + 2, -m - 1)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub rows: Vec<ReferenceRow>,
    pub lists: Vec<ListRow>,
    pub sets: ReferenceSets,
}

impl Reference {
    pub fn table(&self, id: u8) -> impl Iterator<Item = &ReferenceRow> {
        self.rows.iter().filter(move |r| r.table == id)
    }

    pub fn list(&self, index: u32, subcase: Subcase) -> impl Iterator<Item = &ListRow> {
        self.lists.iter().filter(move |r| r.index == index && r.subcase == subcase)
    }
}

fn sets() -> ReferenceSets {
    let classes: Vec<(Vec<i64>, u128)> = vec![
        (vec![-1, 5, 12, 1259], 7),
        (vec![0, 3, 54], 9),
        (vec![1, 66], 13),
        (vec![2, 2389], 19),
    ];
    let mut pairs = Vec::new();
    for (ms, _) in &classes {
        for (i, &a) in ms.iter().enumerate() {
            for &b in &ms[i + 1..] {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort();
    use Subcase::*;
    ReferenceSets {
        coincidence_pairs: pairs,
        coincidence_classes: classes,
        prime_conductor_small_h: vec![
            (1, vec![-1, 1, 2, 4, 7, 8, 10]),
            (4, vec![11, 17, 23, 25, 29]),
            (7, vec![16, 28, 32, 38, 43, 49]),
            (13, vec![31]),
        ],
        index27_small_h: vec![
            (1, vec![12, 39, 93]),
            (4, vec![120, 228]),
            (7, vec![255, 309]),
            (13, vec![498]),
            (28, vec![336, 822]),
            (31, vec![795]),
            (37, vec![471]),
        ],
        list_counts: vec![
            (1, PrimeF, 149),
            (1, CompositeF, 308),
            (1, NineP, 56),
            (1, NineS, 67),
            (3, NineP, 34),
            (3, NineS, 45),
            (27, PrimeF, 45),
            (27, CompositeF, 97),
        ],
        list_totals: vec![(1, 581), (3, 80), (27, 142)],
        allowed_h_below_43: crate::classno::ALLOWED_BELOW_43.to_vec(),
        extra_solutions_m1: vec![(3, 1), (1, -4), (-4, 3), (8, 3), (3, -11), (-11, 8)],
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
}

fn parse_num<T: FromStr>(file: &'static str, line: usize, s: &str, what: &str) -> Result<T, RefDataError> {
    s.parse()
        .map_err(|_| RefDataError::Parse { file, line, msg: format!("bad {what} `{s}`") })
}

fn parse_factorization(file: &'static str, line: usize, s: &str) -> Result<Factorization, RefDataError> {
    let mut factors = Vec::new();
    for term in s.split(',') {
        let (p, e) = term
            .split_once('^')
            .ok_or_else(|| RefDataError::Parse { file, line, msg: format!("bad factor `{term}`") })?;
        factors.push((parse_num(file, line, p, "prime")?, parse_num(file, line, e, "exponent")?));
    }
    if factors.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(RefDataError::Parse { file, line, msg: "primes not strictly increasing".into() });
    }
    Ok(Factorization::from_factors(factors))
}

fn parse_tables() -> Result<Vec<ReferenceRow>, RefDataError> {
    const FILE: &str = "reference_tables.txt";
    let mut rows = Vec::new();
    for (line, cols) in data_lines(TABLES_TXT) {
        let [table, m, h, fact, mod27] = cols[..] else {
            return Err(RefDataError::Parse { file: FILE, line, msg: format!("expected 5 columns, got {}", cols.len()) });
        };
        let row = ReferenceRow {
            table: parse_num(FILE, line, table, "table")?,
            m: parse_num(FILE, line, m, "m")?,
            h: parse_num(FILE, line, h, "h")?,
            factorization: parse_factorization(FILE, line, fact)?,
            mod27: parse_num(FILE, line, mod27, "mod27")?,
        };
        let bad = |msg: String| RefDataError::Invariant { file: FILE, line, m: row.m, msg };
        if row.m < -1 {
            return Err(bad("m < -1".into()));
        }
        let d = discriminant_base(row.m);
        if row.factorization.recompose() != d {
            return Err(bad(format!("factorization {} does not multiply out to D = {d}", row.factorization)));
        }
        if let Some(p) = row.factorization.primes().find(|&p| !arith::is_prime(p)) {
            return Err(bad(format!("{p} is not prime")));
        }
        if row.m.rem_euclid(27) != row.mod27 as i64 {
            return Err(bad(format!("m mod 27 is {}, not {}", row.m.rem_euclid(27), row.mod27)));
        }
        match TABLE_SHAPE.iter().find(|t| t.0 == row.table) {
            Some(&(_, h, _)) if h == row.h => {}
            Some(&(_, h, _)) => return Err(bad(format!("table {} lists h = {h}, row has {}", row.table, row.h))),
            None => return Err(bad(format!("unknown table {}", row.table))),
        }
        rows.push(row);
    }
    if rows.len() != TABLE_ROWS {
        return Err(RefDataError::Count(format!("{} table rows, expected {TABLE_ROWS}", rows.len())));
    }
    for (id, _, n) in TABLE_SHAPE {
        let got = rows.iter().filter(|r| r.table == id).count();
        if got != n {
            return Err(RefDataError::Count(format!("table {id}: {got} rows, expected {n}")));
        }
    }
    Ok(rows)
}

fn parse_lists(sets: &ReferenceSets) -> Result<Vec<ListRow>, RefDataError> {
    const FILE: &str = "small_class_lists.txt";
    let mut rows = Vec::new();
    for (line, cols) in data_lines(LISTS_TXT) {
        let [index, subcase, m, value, h] = cols[..] else {
            return Err(RefDataError::Parse { file: FILE, line, msg: format!("expected 5 columns, got {}", cols.len()) });
        };
        let row = ListRow {
            index: parse_num(FILE, line, index, "index")?,
            subcase: subcase.parse().map_err(|msg| RefDataError::Parse { file: FILE, line, msg })?,
            m: parse_num(FILE, line, m, "m")?,
            value: parse_num(FILE, line, value, "value")?,
            h: parse_num(FILE, line, h, "h")?,
        };
        if !sets.list_counts.iter().any(|c| c.0 == row.index && c.1 == row.subcase) {
            return Err(RefDataError::Parse { file: FILE, line, msg: format!("no list for index {} {}", row.index, row.subcase) });
        }
        if row.value * row.divisor() != discriminant_base(row.m) {
            return Err(RefDataError::Invariant {
                file: FILE,
                line,
                m: row.m,
                msg: format!("value {} · {} is not D", row.value, row.divisor()),
            });
        }
        rows.push(row);
    }
    for &(index, subcase, n) in &sets.list_counts {
        let got = rows.iter().filter(|r| r.index == index && r.subcase == subcase).count();
        if got != n {
            return Err(RefDataError::Count(format!("index {index} {subcase}: {got} rows, expected {n}")));
        }
    }
    for &(index, total) in &sets.list_totals {
        let special = usize::from(index != 27);
        let got: usize = sets.list_counts.iter().filter(|c| c.0 == index).map(|c| c.2).sum();
        if got + special != total {
            return Err(RefDataError::Count(format!("index {index}: counts sum to {}, expected {total}", got + special)));
        }
    }
    Ok(rows)
}

/// Parses and validates the embedded data.
pub fn load() -> Result<Reference, RefDataError> {
    let sets = sets();
    if sets.coincidence_pairs.len() != 11 {
        return Err(RefDataError::Count(format!("{} coincidence pairs", sets.coincidence_pairs.len())));
    }
    let lists = parse_lists(&sets)?;
    Ok(Reference { rows: parse_tables()?, lists, sets })
}

/// The validated data, parsed once per process.
///
/// # Panics
/// If the compiled-in data fails validation.
pub fn reference() -> &'static Reference {
    static CELL: OnceLock<Reference> = OnceLock::new();
    CELL.get_or_init(|| load().unwrap_or_else(|e| panic!("embedded reference data is invalid: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_and_counts() {
        let r = load().unwrap();
        assert_eq!(r.rows.len(), 138);
        assert_eq!(r.table(1).count(), 26);
        assert_eq!(r.sets.coincidence_pairs.len(), 11);
        assert_eq!(r.lists.len(), 801);
        let index1: usize = r.sets.list_counts.iter().filter(|c| c.0 == 1).map(|c| c.2).sum();
        assert_eq!(1 + index1, 581);
    }

    #[test]
    fn printed_factorizations() {
        let r = reference();
        let find = |m| r.rows.iter().find(|row| row.m == m).unwrap();
        assert_eq!(find(506370).factorization.to_string(), "3^3*193^3*1321^1");
        assert_eq!(find(6440111).factorization.to_string(), "7^3*229^3*10069^1");
        assert_eq!(find(1376233).factorization.to_string(), "7^1*13^3*43^3*1549^1");
        let h13: Vec<i64> = r.table(7).map(|row| row.m).collect();
        assert_eq!(h13, vec![31, 498, 36435]);
    }

    #[test]
    fn fixed_sets_agree_with_tables() {
        let r = reference();
        for (h, ms) in r.sets.prime_conductor_small_h.iter().chain(&r.sets.index27_small_h) {
            for &m in ms {
                if let Some(row) = r.rows.iter().find(|row| row.m == m) {
                    assert_eq!(row.h, *h, "m = {m}");
                }
            }
        }
        for (ms, _) in &r.sets.coincidence_classes {
            for &m in ms {
                assert_eq!(r.rows.iter().find(|row| row.m == m).map(|row| row.h), Some(1), "m = {m}");
            }
        }
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(parse_factorization("t", 1, "7^1,3^2").is_err());
        assert!(parse_factorization("t", 1, "7").is_err());
        assert_eq!(parse_factorization("t", 1, "3^2,7^1").unwrap().recompose(), 63);
        assert!("nine_q".parse::<Subcase>().is_err());
    }
}
