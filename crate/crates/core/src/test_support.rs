use crate::scalar::{parse_rational, Rational};
use crate::simplex::DistTuple;

pub(crate) fn rats(values: &[&str]) -> Vec<Rational> {
    values.iter().map(|s| parse_rational(s).unwrap()).collect()
}

/// The six-member, four-site reference tuple used throughout the golden tests.
pub(crate) fn example_tuple() -> DistTuple<Rational> {
    let rows = [
        [".2", ".2", ".2", ".4"],
        [".3", ".0", ".4", ".3"],
        [".6", ".0", ".3", ".1"],
        [".0", ".2", ".1", ".7"],
        [".7", ".1", ".2", ".0"],
        [".1", ".4", ".0", ".5"],
    ];
    DistTuple::from_rows(rows.iter().map(|r| rats(r)).collect()).unwrap()
}
