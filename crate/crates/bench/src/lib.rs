//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use dihedral::{ClassCharacter, FormClassGroup, FundamentalDiscriminant};

pub fn group(d: i64) -> Arc<FormClassGroup> {
    let d = FundamentalDiscriminant::new(d).expect("fundamental discriminant");
    Arc::new(FormClassGroup::new(d).expect("class group"))
}

/// A character of order 3 on the last cyclic factor of the class group of `d`.
pub fn cubic(d: i64) -> ClassCharacter {
    let g = group(d);
    let mut exps = vec![0i64; g.cyclic().len()];
    let last = g.cyclic().last().expect("nontrivial class group").1 as i64;
    *exps.last_mut().unwrap() = last / 3;
    ClassCharacter::new(g, &exps).expect("order 3")
}
