//! Finite lamp group presented by its multiplication table and a symmetric
//! generating set. Element 0 is the identity. Word lengths from the identity
//! are precomputed once by breadth-first search and back every lamp-cost
//! bound used by the walk experiments.

#[derive(Debug, thiserror::Error)]
pub enum GroupError {
    #[error("group order must be between 1 and {max}, got {got}", max = u16::MAX)]
    BadOrder { got: usize },
    #[error("multiplication table is not {order}x{order}")]
    BadTableShape { order: usize },
    #[error("table entry {value} at ({row}, {col}) outside 0..{order}")]
    EntryOutOfRange { row: usize, col: usize, value: usize, order: usize },
    #[error("element 0 is not a two-sided identity")]
    NoIdentity,
    #[error("row {0} of the table is not a permutation")]
    RowNotPermutation(usize),
    #[error("column {0} of the table is not a permutation")]
    ColumnNotPermutation(usize),
    #[error("associativity fails at ({a} {g}) {b}")]
    NotAssociative { a: u16, g: u16, b: u16 },
    #[error("generator {0} out of range")]
    GeneratorOutOfRange(u16),
    #[error("identity listed as a generator")]
    IdentityGenerator,
    #[error("generator {g} has inverse {inv} missing from the generator set")]
    GeneratorsNotSymmetric { g: u16, inv: u16 },
    #[error("generators listed twice")]
    DuplicateGenerator,
    #[error("generators do not reach all {order} elements (Cayley graph disconnected)")]
    Disconnected { order: usize },
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A finite group together with the Cayley-graph structure induced by a
/// symmetric generating set (adjacency by right multiplication).
#[derive(Debug, Clone)]
pub struct FiniteGroupGraph {
    order: u16,
    table: Vec<u16>,
    generators: Vec<u16>,
    inverse: Vec<u16>,
    dist: Vec<u32>,
}

impl FiniteGroupGraph {
    /// Validates and builds a group from a full multiplication table
    /// (`rows[a][b]` = a*b) and a generator list. Identity must be element 0,
    /// generators must exclude it, be duplicate-free, closed under inverses,
    /// and generate the whole group.
    pub fn new(rows: Vec<Vec<u16>>, generators: Vec<u16>) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 || order > u16::MAX as usize {
            return Err(GroupError::BadOrder { got: order });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::BadTableShape { order });
            }
            for (c, &v) in row.iter().enumerate() {
                if v as usize >= order {
                    return Err(GroupError::EntryOutOfRange {
                        row: r,
                        col: c,
                        value: v as usize,
                        order,
                    });
                }
            }
        }
        let k = order as u16;
        let table: Vec<u16> = rows.iter().flatten().copied().collect();
        let at = |a: u16, b: u16| table[a as usize * order + b as usize];

        for x in 0..k {
            if at(0, x) != x || at(x, 0) != x {
                return Err(GroupError::NoIdentity);
            }
        }
        for r in 0..k {
            let mut seen = vec![false; order];
            for c in 0..k {
                if std::mem::replace(&mut seen[at(r, c) as usize], true) {
                    return Err(GroupError::RowNotPermutation(r as usize));
                }
            }
        }
        for c in 0..k {
            let mut seen = vec![false; order];
            for r in 0..k {
                if std::mem::replace(&mut seen[at(r, c) as usize], true) {
                    return Err(GroupError::ColumnNotPermutation(c as usize));
                }
            }
        }

        let mut gens = generators.clone();
        gens.sort_unstable();
        gens.dedup();
        if gens.len() != generators.len() {
            return Err(GroupError::DuplicateGenerator);
        }
        for &g in &gens {
            if g >= k {
                return Err(GroupError::GeneratorOutOfRange(g));
            }
            if g == 0 {
                return Err(GroupError::IdentityGenerator);
            }
        }

        // Inverses: the permutation property guarantees a unique right
        // solution of a*x = 0; two-sidedness follows once associativity holds.
        let mut inverse = vec![0u16; order];
        for a in 0..k {
            let inv = (0..k).find(|&x| at(a, x) == 0).expect("row is a permutation");
            inverse[a as usize] = inv;
        }
        for &g in &gens {
            let inv = inverse[g as usize];
            if gens.binary_search(&inv).is_err() {
                return Err(GroupError::GeneratorsNotSymmetric { g, inv });
            }
        }

        // Associativity. Full check for small tables; for larger ones Light's
        // test over the generating set suffices because connectivity (checked
        // below) makes the generators generate every element.
        if order <= 128 {
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        if at(at(a, b), c) != at(a, at(b, c)) {
                            return Err(GroupError::NotAssociative { a, g: b, b: c });
                        }
                    }
                }
            }
        } else {
            for &g in &gens {
                for a in 0..k {
                    for b in 0..k {
                        if at(at(a, g), b) != at(a, at(g, b)) {
                            return Err(GroupError::NotAssociative { a, g, b });
                        }
                    }
                }
            }
        }

        // Distances from the identity; doubles as the connectivity check.
        let mut dist = vec![u32::MAX; order];
        dist[0] = 0;
        let mut queue = std::collections::VecDeque::from([0u16]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = at(x, g);
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    queue.push_back(y);
                }
            }
        }
        if dist.contains(&u32::MAX) {
            return Err(GroupError::Disconnected { order });
        }

        Ok(FiniteGroupGraph { order: k, table, generators: gens, inverse, dist })
    }

    /// Parses the plain-text format: first line the order `k`, then `k`
    /// lines of `k` integers (the multiplication table, identity = element
    /// 0), then one line listing the generator indices. Blank lines and
    /// `#`-comments are ignored.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (line_no, first) = lines
            .next()
            .ok_or(GroupError::Parse { line: 0, reason: "empty input".into() })?;
        let order: usize = first.parse().map_err(|_| GroupError::Parse {
            line: line_no,
            reason: format!("expected group order, got {first:?}"),
        })?;
        if order == 0 || order > u16::MAX as usize {
            return Err(GroupError::BadOrder { got: order });
        }

        let mut rows = Vec::with_capacity(order);
        for _ in 0..order {
            let (line_no, line) = lines.next().ok_or(GroupError::Parse {
                line: 0,
                reason: "table ended early".into(),
            })?;
            let row = parse_ints(line, line_no)?;
            if row.len() != order {
                return Err(GroupError::Parse {
                    line: line_no,
                    reason: format!("expected {} entries, got {}", order, row.len()),
                });
            }
            rows.push(row);
        }
        let (line_no, gen_line) = lines.next().ok_or(GroupError::Parse {
            line: 0,
            reason: "missing generator line".into(),
        })?;
        let generators = parse_ints(gen_line, line_no)?;
        if let Some((line_no, _)) = lines.next() {
            return Err(GroupError::Parse { line: line_no, reason: "trailing content".into() });
        }
        Self::new(rows, generators)
    }

    /// Cyclic group of order `n` with generators `{1, n-1}` (just `{1}` for
    /// `n = 2`).
    pub fn cyclic(n: u16) -> Self {
        assert!(n >= 2, "cyclic lamp group needs order >= 2");
        let rows: Vec<Vec<u16>> = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        let gens = if n == 2 { vec![1] } else { vec![1, n - 1] };
        Self::new(rows, gens).expect("cyclic construction is always valid")
    }

    pub fn order(&self) -> u16 {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.table[a as usize * self.order as usize + b as usize]
    }

    pub fn inv(&self, a: u16) -> u16 {
        self.inverse[a as usize]
    }

    pub fn generators(&self) -> &[u16] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Word length of `a` in the generators (graph distance from identity).
    #[inline]
    pub fn dist_from_identity(&self, a: u16) -> u32 {
        self.dist[a as usize]
    }

    /// Largest word length over the group.
    pub fn diameter_from_identity(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}

fn parse_ints(line: &str, line_no: usize) -> Result<Vec<u16>, GroupError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u16>().map_err(|_| GroupError::Parse {
                line: line_no,
                reason: format!("expected integer, got {tok:?}"),
            })
        })
        .collect()
}
