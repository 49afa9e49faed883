//! Engine-vs-enumeration agreement on exhaustively searchable regions.

use fpp_core::rng::mix64;
use fpp_core::{
    engine, DistributionSpec, EdgeWeights, Region, Vertex, WeightField,
};
use std::collections::BTreeSet;

fn spec_for(k: u64) -> DistributionSpec {
    match k % 4 {
        0 => DistributionSpec::Constant { value: 1.0 },
        1 => DistributionSpec::DurrettLiggett { p: 0.8, high: 5.0 },
        2 => DistributionSpec::BernoulliZero { p0: 0.3, high: 2.0 },
        _ => DistributionSpec::Exponential { rate: 1.0 },
    }
}

struct Instance {
    field: WeightField,
    region: Region,
    s: Vertex,
    t: Vertex,
}

fn instance(k: u64) -> Instance {
    let spec = spec_for(k);
    let field = WeightField::new(spec, mix64(k ^ 0xabcd), 0).unwrap();
    let ox = (mix64(k ^ 1) % 7) as i64 - 3;
    let oy = (mix64(k ^ 2) % 7) as i64 - 3;
    let region = Region::new(ox, ox + 4, oy, oy + 4).unwrap();
    let si = (mix64(k ^ 3) % 25) as usize;
    let mut ti = (mix64(k ^ 4) % 25) as usize;
    if ti == si {
        ti = (ti + 7) % 25;
    }
    Instance { field, region, s: region.vertex(si), t: region.vertex(ti) }
}

fn engine_units(field: &WeightField, map: &engine::PassageTimeMap, v: Vertex) -> f64 {
    match field.tick_domain() {
        Some(_) => map.ticks(v).unwrap() as f64,
        None => map.time(v).unwrap(),
    }
}

#[test]
fn passage_times_match_enumeration() {
    for k in 0..60 {
        let inst = instance(k);
        let map = engine::passage_times(&inst.field, &inst.region, inst.s).unwrap();
        let oracle = fpp_oracle::min_time(&inst.field, &inst.region, inst.s, inst.t);
        assert_eq!(
            engine_units(&inst.field, &map, inst.t),
            oracle.units,
            "instance {k} ({:?})",
            inst.field.spec
        );
    }
}

#[test]
fn fixed_durrett_liggett_instance_matches_enumeration() {
    // pinned 5x5 case exercising the corner-to-corner diagonal
    let field =
        WeightField::new(DistributionSpec::DurrettLiggett { p: 0.8, high: 5.0 }, 424242, 0)
            .unwrap();
    let region = Region::new(0, 4, 0, 4).unwrap();
    let map = engine::passage_times(&field, &region, Vertex::new(0, 0)).unwrap();
    let oracle = fpp_oracle::min_time(&field, &region, Vertex::new(0, 0), Vertex::new(4, 4));
    assert_eq!(map.ticks(Vertex::new(4, 4)).unwrap() as f64, oracle.units);
}

#[test]
fn geodesic_times_match_enumeration() {
    for k in 0..40 {
        let inst = instance(k);
        let g = engine::geodesic_confined(&inst.field, &inst.region, inst.s, inst.t).unwrap();
        let oracle = fpp_oracle::min_time(&inst.field, &inst.region, inst.s, inst.t);
        let engine_total = match inst.field.tick_domain() {
            Some(td) => g.total_time / td.quantum,
            None => g.total_time,
        };
        assert_eq!(engine_total, oracle.units, "instance {k}");
        // witness path really costs its total
        let sum: f64 = g
            .vertices
            .windows(2)
            .map(|p| inst.field.weight(fpp_core::EdgeId::between(p[0], p[1])))
            .sum();
        assert!((sum - g.total_time).abs() <= 1e-12 * g.total_time.max(1.0));
    }
}

#[test]
fn optimal_vertex_sets_match_enumeration() {
    for k in 0..40 {
        let inst = instance(k);
        let m =
            engine::optimal_vertex_set_confined(&inst.field, &inst.region, inst.s, inst.t)
                .unwrap();
        let members: BTreeSet<Vertex> = m.members.iter().copied().collect();
        let criterion = fpp_oracle::criterion_set(&inst.field, &inst.region, inst.s, inst.t);
        assert_eq!(members, criterion, "instance {k} ({:?})", inst.field.spec);
        // strictly positive atoms: optimal walks reduce to self-avoiding paths
        match inst.field.spec {
            DistributionSpec::Constant { .. } | DistributionSpec::DurrettLiggett { .. } => {
                let union =
                    fpp_oracle::optimal_sap_union(&inst.field, &inst.region, inst.s, inst.t);
                assert_eq!(members, union, "instance {k}");
            }
            _ => {
                let union =
                    fpp_oracle::optimal_sap_union(&inst.field, &inst.region, inst.s, inst.t);
                assert!(union.is_subset(&members), "instance {k}");
            }
        }
        assert!(m.witness.vertices.iter().all(|v| members.contains(v)));
    }
}

#[test]
fn point_to_line_matches_enumeration() {
    for k in 0..40 {
        let inst = instance(k);
        let line_x = inst.region.xmax - (mix64(k ^ 9) % 2) as i64;
        if inst.s.x > line_x {
            continue;
        }
        let got = engine::point_to_line_time(&inst.field, &inst.region, inst.s, line_x).unwrap();
        let oracle = fpp_oracle::min_time_to_line(&inst.field, &inst.region, inst.s, line_x);
        assert_eq!(got, oracle.as_time(), "instance {k}");
    }
}

#[test]
fn public_operations_flag_ring_contact_exactly_when_confined_sets_touch() {
    let mut flagged = 0;
    for k in 0..60 {
        let inst = instance(k);
        let confined =
            engine::optimal_vertex_set_confined(&inst.field, &inst.region, inst.s, inst.t)
                .unwrap();
        let touches = confined
            .members
            .iter()
            .any(|&v| v != inst.s && v != inst.t && inst.region.on_boundary(v));
        let public = engine::optimal_vertex_set(&inst.field, &inst.region, inst.s, inst.t);
        assert_eq!(public.is_err(), touches, "instance {k}");
        flagged += touches as u32;
    }
    assert!(flagged > 0, "expected some instances to touch the ring");
}
