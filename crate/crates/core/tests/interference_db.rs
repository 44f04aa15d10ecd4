mod support;

use blackspace_core::sim::{build_interference_db, InterferenceDb, PuSpec, SuSpec};
use blackspace_core::SeedStream;
use support::{all_pairs, random_channel, random_point, spatial};

const N_CHANNELS: u32 = 8;

fn snapshot(db: &InterferenceDb) -> (Vec<PuSpec>, Vec<SuSpec>) {
    (
        db.pu_ids().map(|id| db.pu(id).unwrap()).collect(),
        db.su_ids().map(|id| db.su(id).unwrap()).collect(),
    )
}

fn assert_matches_oracle(db: &InterferenceDb, s: &blackspace_core::SpatialParams) {
    db.check_invariants().unwrap();
    let (pus, sus) = snapshot(db);
    assert_eq!(db.relation(), all_pairs(&pus, &sus, s));
    for su in &sus {
        let watched: Vec<u32> = db
            .interferers(su.id)
            .unwrap()
            .iter()
            .filter_map(|&p| db.pu(p).unwrap().channel)
            .collect();
        let free: Vec<u32> = (1..=N_CHANNELS).filter(|c| !watched.contains(c)).collect();
        assert_eq!(db.free_channels_for(su.id).unwrap(), free);
    }
    for pu in &pus {
        for c in 1..=N_CHANNELS {
            let expected: Vec<u32> = db
                .guard_set(pu.id)
                .unwrap()
                .iter()
                .copied()
                .filter(|&q| db.su(q).unwrap().channel == Some(c))
                .collect();
            assert_eq!(db.affected_sus(pu.id, c).unwrap(), expected);
        }
    }
}

#[test]
fn random_instances_match_all_pairs() {
    let mut rng = SeedStream::new(2024);
    for instance in 0..100 {
        let width = 200.0 + 1800.0 * rng.uniform();
        let height = 200.0 + 1800.0 * rng.uniform();
        let r_p = 20.0 + 200.0 * rng.uniform();
        let s = spatial(width, height, r_p);
        let pus: Vec<PuSpec> = (0..rng.index(60) as u32)
            .map(|id| PuSpec {
                id,
                pos: random_point(&mut rng, &s),
                channel: random_channel(&mut rng, N_CHANNELS),
            })
            .collect();
        let sus: Vec<SuSpec> = (0..rng.index(120) as u32)
            .map(|id| SuSpec {
                id: 1000 + id,
                pos: random_point(&mut rng, &s),
                channel: random_channel(&mut rng, N_CHANNELS),
            })
            .collect();
        let db = build_interference_db(&pus, &sus, &s, N_CHANNELS).unwrap();
        assert_eq!(
            db.relation(),
            all_pairs(&pus, &sus, &s),
            "instance {instance}"
        );
        assert_matches_oracle(&db, &s);
    }
}

#[test]
fn mutation_sequences_keep_relation_exact() {
    let mut rng = SeedStream::new(7);
    let s = spatial(1000.0, 700.0, 130.0);
    let mut db = InterferenceDb::new(&s, N_CHANNELS).unwrap();
    let mut next_id = 0u32;
    for step in 0..1000 {
        let (pus, sus) = snapshot(&db);
        match rng.index(6) {
            0 | 1 => {
                next_id += 1;
                db.add_pu(PuSpec {
                    id: next_id,
                    pos: random_point(&mut rng, &s),
                    channel: random_channel(&mut rng, N_CHANNELS),
                })
                .unwrap();
            }
            2 => {
                next_id += 1;
                db.add_su(SuSpec {
                    id: next_id,
                    pos: random_point(&mut rng, &s),
                    channel: random_channel(&mut rng, N_CHANNELS),
                })
                .unwrap();
            }
            3 if !pus.is_empty() => {
                let victim = pus[rng.index(pus.len())].id;
                assert_eq!(db.remove_pu(victim).unwrap().id, victim);
            }
            4 if !sus.is_empty() => {
                let victim = sus[rng.index(sus.len())].id;
                db.remove_su(victim).unwrap();
            }
            _ if !pus.is_empty() => {
                let pu = pus[rng.index(pus.len())].id;
                db.set_pu_channel(pu, random_channel(&mut rng, N_CHANNELS))
                    .unwrap();
            }
            _ => {}
        }
        if step % 10 == 0 || step == 999 {
            assert_matches_oracle(&db, &s);
        } else {
            db.check_invariants().unwrap();
        }
    }
    assert!(db.pu_count() > 0 && db.su_count() > 0);
}

#[test]
fn bad_mutations_leave_db_untouched() {
    let s = spatial(500.0, 500.0, 100.0);
    let pu = PuSpec {
        id: 1,
        pos: blackspace_core::Point2D { x: 10.0, y: 10.0 },
        channel: Some(1),
    };
    let mut db = build_interference_db(&[pu], &[], &s, N_CHANNELS).unwrap();
    let before = db.relation();
    assert!(db.add_pu(pu).is_err());
    assert!(db
        .add_su(SuSpec {
            id: 9,
            pos: blackspace_core::Point2D { x: 600.0, y: 0.0 },
            channel: None,
        })
        .is_err());
    assert!(db.set_pu_channel(1, Some(N_CHANNELS + 1)).is_err());
    assert!(db.remove_su(42).is_err());
    assert_eq!(db.relation(), before);
    assert_eq!(db.pu(1).unwrap().channel, Some(1));
    db.check_invariants().unwrap();
}
