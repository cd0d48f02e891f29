//! Polymorphism checks and near-unanimity search.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::structures::{
    checked_pow, find_homomorphism, power_structure_bounded, tuple_at, tuple_index, Element,
    Mapping, Structure,
};

/// Default cap on `m^k`, the number of cells in a searched table.
pub const DEFAULT_TABLE_BOUND: usize = 4096;

/// A total `k`-ary operation on `0..m`, stored in lexicographic argument
/// order (the same order as the elements of the `k`-th power).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperationTable {
    arity: usize,
    domain_size: usize,
    table: Vec<Element>,
}

impl OperationTable {
    pub fn new(arity: usize, domain_size: usize, table: Vec<Element>) -> Result<Self> {
        let cells = checked_pow(domain_size, arity).ok_or(Error::SizeBound {
            size: usize::MAX,
            bound: usize::MAX,
        })?;
        if arity == 0 || domain_size == 0 || table.len() != cells {
            return Err(Error::TableMismatch {
                expected: cells,
                found: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= domain_size) {
            return Err(Error::ElementOutOfRange {
                element: bad,
                size: domain_size,
            });
        }
        Ok(OperationTable {
            arity,
            domain_size,
            table,
        })
    }

    pub fn from_fn(arity: usize, domain_size: usize, f: impl Fn(&[Element]) -> Element) -> Result<Self> {
        let cells = checked_pow(domain_size, arity).unwrap_or(0);
        let table = (0..cells).map(|i| f(&tuple_at(i, domain_size, arity))).collect();
        OperationTable::new(arity, domain_size, table)
    }

    /// Ternary majority; ties (all distinct) go to the first argument.
    pub fn majority(domain_size: usize) -> Self {
        OperationTable::from_fn(3, domain_size, |x| if x[1] == x[2] { x[1] } else { x[0] })
            .expect("valid table")
    }

    pub fn projection(arity: usize, domain_size: usize, coordinate: usize) -> Self {
        OperationTable::from_fn(arity, domain_size, |x| x[coordinate]).expect("valid table")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn table(&self) -> &[Element] {
        &self.table
    }

    pub fn apply(&self, args: &[Element]) -> Element {
        self.table[tuple_index(args, self.domain_size)]
    }

    pub fn as_mapping(&self) -> Mapping {
        Mapping::from_total(&self.table)
    }
}

/// Checks that applying `f` coordinatewise to any `k` tuples of a relation
/// lands back in that relation.
pub fn is_polymorphism(b: &Structure, f: &OperationTable) -> Result<bool> {
    if f.domain_size != b.size() {
        return Err(Error::TableMismatch {
            expected: b.size(),
            found: f.domain_size,
        });
    }
    for (_, arity, rel) in b.relations() {
        let tuples: Vec<_> = rel.iter().collect();
        for rows in (0..f.arity).map(|_| tuples.iter()).multi_cartesian_product() {
            let image: Vec<Element> = (0..arity)
                .map(|col| f.apply(&rows.iter().map(|r| r[col]).collect::<Vec<_>>()))
                .collect();
            if !rel.contains(&image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The value forced on `args` by the near-unanimity identities, if any.
fn nu_forced(args: &[Element]) -> Option<Element> {
    let k = args.len();
    args.iter()
        .copied()
        .find(|&x| args.iter().filter(|&&y| y == x).count() >= k - 1)
}

pub fn is_near_unanimity(f: &OperationTable) -> Result<bool> {
    if f.arity < 3 {
        return Err(Error::ArityTooSmall(f.arity));
    }
    Ok((0..f.table.len()).all(|i| {
        let args = tuple_at(i, f.domain_size, f.arity);
        nu_forced(&args).is_none_or(|x| f.table[i] == x)
    }))
}

pub fn find_nu(b: &Structure, k: usize) -> Result<Option<OperationTable>> {
    find_nu_bounded(b, k, DEFAULT_TABLE_BOUND)
}

/// Searches for a `k`-ary near-unanimity polymorphism. Cells fixed by the
/// identities are pinned; the free cells are found as a homomorphism from
/// the `k`-th power to `b`. `None` means none exists at this arity.
pub fn find_nu_bounded(b: &Structure, k: usize, bound: usize) -> Result<Option<OperationTable>> {
    if k < 3 {
        return Err(Error::ArityTooSmall(k));
    }
    let m = b.size();
    let power = power_structure_bounded(b, k, bound)?;
    let pins: Mapping = (0..power.size())
        .filter_map(|i| nu_forced(&tuple_at(i, m, k)).map(|x| (i, x)))
        .collect();
    let Some(hom) = find_homomorphism(&power, b, &pins)? else {
        return Ok(None);
    };
    let table = hom.to_total(power.size()).expect("homomorphisms are total");
    Ok(Some(OperationTable::new(k, m, table)?))
}
