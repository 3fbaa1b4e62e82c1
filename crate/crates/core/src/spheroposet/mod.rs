//! The concrete complexes behind the connectivity argument: the decorated
//! flag complexes `C_n`, descending links of split records, the partition
//! posets that cone them off, and orbit counts for truncations of `Q`.

mod cn;
mod orbits;
mod partition;
mod split;
mod truncation;

pub use cn::{
    build_cn, desc_link_cn, morse_f, nu_bound, CnLink, DecoratedComplex, DecoratedComplexJson, DecoratedVertex,
    VertexJson, MAX_GROUND_SET,
};
pub use orbits::{admissible_levels, count_equivariant_cells, DEFAULT_ORBIT_CAP};
pub use partition::{partition_id, partition_poset, refines, BallPartition, BallPartitionPoset, ConeCheck};
pub use split::{
    enumerate_desc_link, enumerate_desc_link_star, split_records, SplitPoset, SplitRecord, Tree, DEFAULT_LINK_CAP,
};
pub use truncation::{depth_bounded_strict, q_truncation_below, QTruncation};

#[cfg(test)]
mod tests;
