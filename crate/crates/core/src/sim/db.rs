//! Interference relation between TV receivers and secondary users.
//!
//! A secondary user belongs to a receiver's guard set exactly when it lies
//! within `r_p` of the receiver on the torus. The relation is stored from both
//! sides and kept symmetric through every insertion and removal; candidate
//! pairs come from a bucket grid with cells at least `r_p` wide.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::model::{Point2D, SpatialParams};
use crate::{Error, Result};

pub type PuId = u32;
pub type SuId = u32;

/// A TV receiver and the channel it is watching, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PuSpec {
    pub id: PuId,
    pub pos: Point2D,
    pub channel: Option<u32>,
}

/// A secondary link and its operating channel; `None` when blocked.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SuSpec {
    pub id: SuId,
    pub pos: Point2D,
    pub channel: Option<u32>,
}

#[derive(Debug, Clone)]
struct PuRecord {
    pos: Point2D,
    channel: Option<u32>,
    cell: usize,
    guard: Vec<SuId>,
}

#[derive(Debug, Clone)]
struct SuRecord {
    pos: Point2D,
    channel: Option<u32>,
    cell: usize,
    interferers: Vec<PuId>,
}

#[derive(Debug, Clone, Default)]
struct Bucket {
    pus: Vec<PuId>,
    sus: Vec<SuId>,
}

#[derive(Debug, Clone)]
pub struct InterferenceDb {
    width: f64,
    height: f64,
    r_p: f64,
    n_channels: u32,
    nx: usize,
    ny: usize,
    pus: BTreeMap<PuId, PuRecord>,
    sus: BTreeMap<SuId, SuRecord>,
    buckets: Vec<Bucket>,
}

impl InterferenceDb {
    pub fn new(spatial: &SpatialParams, n_channels: u32) -> Result<Self> {
        spatial.validate()?;
        if n_channels < 1 {
            return Err(Error::invalid(
                "n_channels",
                "at least one channel is required",
            ));
        }
        let nx = ((spatial.region_width / spatial.r_p) as usize).clamp(1, 4096);
        let ny = ((spatial.region_height / spatial.r_p) as usize).clamp(1, 4096);
        Ok(Self {
            width: spatial.region_width,
            height: spatial.region_height,
            r_p: spatial.r_p,
            n_channels,
            nx,
            ny,
            pus: BTreeMap::new(),
            sus: BTreeMap::new(),
            buckets: alloc::vec![Bucket::default(); nx * ny],
        })
    }

    pub fn n_channels(&self) -> u32 {
        self.n_channels
    }

    pub fn pu_count(&self) -> usize {
        self.pus.len()
    }

    pub fn su_count(&self) -> usize {
        self.sus.len()
    }

    pub fn pu_ids(&self) -> impl Iterator<Item = PuId> + '_ {
        self.pus.keys().copied()
    }

    pub fn su_ids(&self) -> impl Iterator<Item = SuId> + '_ {
        self.sus.keys().copied()
    }

    pub fn pu(&self, id: PuId) -> Option<PuSpec> {
        self.pus.get(&id).map(|r| PuSpec {
            id,
            pos: r.pos,
            channel: r.channel,
        })
    }

    pub fn su(&self, id: SuId) -> Option<SuSpec> {
        self.sus.get(&id).map(|r| SuSpec {
            id,
            pos: r.pos,
            channel: r.channel,
        })
    }

    pub fn distance(&self, a: &Point2D, b: &Point2D) -> f64 {
        a.torus_distance(b, self.width, self.height)
    }

    fn cell_of(&self, p: &Point2D) -> usize {
        let cx = ((p.x / self.width * self.nx as f64) as usize).min(self.nx - 1);
        let cy = ((p.y / self.height * self.ny as f64) as usize).min(self.ny - 1);
        cy * self.nx + cx
    }

    /// The cell and its eight torus neighbours, deduplicated.
    fn neighbourhood(&self, cell: usize) -> Vec<usize> {
        let (cx, cy) = ((cell % self.nx) as isize, (cell / self.nx) as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let mut cells = Vec::with_capacity(9);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let x = (cx + dx).rem_euclid(nx);
                let y = (cy + dy).rem_euclid(ny);
                cells.push((y * nx + x) as usize);
            }
        }
        cells.sort_unstable();
        cells.dedup();
        cells
    }

    fn check_point(&self, p: &Point2D) -> Result<()> {
        let inside = p.x.is_finite()
            && p.y.is_finite()
            && (0.0..self.width).contains(&p.x)
            && (0.0..self.height).contains(&p.y);
        if inside {
            Ok(())
        } else {
            Err(Error::OutsideRegion {
                x: p.x,
                y: p.y,
                width: self.width,
                height: self.height,
            })
        }
    }

    fn check_channel(&self, channel: Option<u32>) -> Result<()> {
        match channel {
            Some(c) if c < 1 || c > self.n_channels => Err(Error::InvalidChannel {
                channel: c,
                n_channels: self.n_channels,
            }),
            _ => Ok(()),
        }
    }

    pub fn add_pu(&mut self, spec: PuSpec) -> Result<()> {
        if self.pus.contains_key(&spec.id) {
            return Err(Error::DuplicateId {
                kind: "PU",
                id: spec.id,
            });
        }
        self.check_point(&spec.pos)?;
        self.check_channel(spec.channel)?;
        let cell = self.cell_of(&spec.pos);
        let mut guard = Vec::new();
        for c in self.neighbourhood(cell) {
            for &su in &self.buckets[c].sus {
                if self.distance(&spec.pos, &self.sus[&su].pos) <= self.r_p {
                    guard.push(su);
                }
            }
        }
        guard.sort_unstable();
        for su in &guard {
            let rec = self.sus.get_mut(su).expect("bucketed SU exists");
            insert_sorted(&mut rec.interferers, spec.id);
        }
        insert_sorted(&mut self.buckets[cell].pus, spec.id);
        self.pus.insert(
            spec.id,
            PuRecord {
                pos: spec.pos,
                channel: spec.channel,
                cell,
                guard,
            },
        );
        Ok(())
    }

    pub fn add_su(&mut self, spec: SuSpec) -> Result<()> {
        if self.sus.contains_key(&spec.id) {
            return Err(Error::DuplicateId {
                kind: "SU",
                id: spec.id,
            });
        }
        self.check_point(&spec.pos)?;
        self.check_channel(spec.channel)?;
        let cell = self.cell_of(&spec.pos);
        let mut interferers = Vec::new();
        for c in self.neighbourhood(cell) {
            for &pu in &self.buckets[c].pus {
                if self.distance(&spec.pos, &self.pus[&pu].pos) <= self.r_p {
                    interferers.push(pu);
                }
            }
        }
        interferers.sort_unstable();
        for pu in &interferers {
            let rec = self.pus.get_mut(pu).expect("bucketed PU exists");
            insert_sorted(&mut rec.guard, spec.id);
        }
        insert_sorted(&mut self.buckets[cell].sus, spec.id);
        self.sus.insert(
            spec.id,
            SuRecord {
                pos: spec.pos,
                channel: spec.channel,
                cell,
                interferers,
            },
        );
        Ok(())
    }

    pub fn remove_pu(&mut self, id: PuId) -> Result<PuSpec> {
        let rec = self
            .pus
            .remove(&id)
            .ok_or(Error::UnknownId { kind: "PU", id })?;
        for su in &rec.guard {
            remove_sorted(
                &mut self.sus.get_mut(su).expect("symmetric").interferers,
                id,
            );
        }
        remove_sorted(&mut self.buckets[rec.cell].pus, id);
        Ok(PuSpec {
            id,
            pos: rec.pos,
            channel: rec.channel,
        })
    }

    pub fn remove_su(&mut self, id: SuId) -> Result<SuSpec> {
        let rec = self
            .sus
            .remove(&id)
            .ok_or(Error::UnknownId { kind: "SU", id })?;
        for pu in &rec.interferers {
            remove_sorted(&mut self.pus.get_mut(pu).expect("symmetric").guard, id);
        }
        remove_sorted(&mut self.buckets[rec.cell].sus, id);
        Ok(SuSpec {
            id,
            pos: rec.pos,
            channel: rec.channel,
        })
    }

    pub fn set_pu_channel(&mut self, id: PuId, channel: Option<u32>) -> Result<()> {
        self.check_channel(channel)?;
        self.pus
            .get_mut(&id)
            .ok_or(Error::UnknownId { kind: "PU", id })?
            .channel = channel;
        Ok(())
    }

    pub fn set_su_channel(&mut self, id: SuId, channel: Option<u32>) -> Result<()> {
        self.check_channel(channel)?;
        self.sus
            .get_mut(&id)
            .ok_or(Error::UnknownId { kind: "SU", id })?
            .channel = channel;
        Ok(())
    }

    /// Secondary users inside the receiver's guard zone, ascending.
    pub fn guard_set(&self, pu: PuId) -> Result<&[SuId]> {
        Ok(&self
            .pus
            .get(&pu)
            .ok_or(Error::UnknownId { kind: "PU", id: pu })?
            .guard)
    }

    /// Receivers whose guard zone contains the secondary user, ascending.
    pub fn interferers(&self, su: SuId) -> Result<&[PuId]> {
        Ok(&self
            .sus
            .get(&su)
            .ok_or(Error::UnknownId { kind: "SU", id: su })?
            .interferers)
    }

    /// Guard-set members currently operating on `channel`.
    pub fn affected_sus(&self, pu: PuId, channel: u32) -> Result<Vec<SuId>> {
        Ok(self
            .guard_set(pu)?
            .iter()
            .copied()
            .filter(|su| self.sus[su].channel == Some(channel))
            .collect())
    }

    /// Channels not watched by any receiver whose guard zone contains `su`.
    pub fn free_channels_for(&self, su: SuId) -> Result<Vec<u32>> {
        let mut used = alloc::vec![false; self.n_channels as usize + 1];
        for pu in self.interferers(su)? {
            if let Some(c) = self.pus[pu].channel {
                used[c as usize] = true;
            }
        }
        Ok((1..=self.n_channels)
            .filter(|&c| !used[c as usize])
            .collect())
    }

    /// Every (PU, SU) pair in the relation.
    pub fn relation(&self) -> BTreeSet<(PuId, SuId)> {
        self.pus
            .iter()
            .flat_map(|(&pu, rec)| rec.guard.iter().map(move |&su| (pu, su)))
            .collect()
    }

    /// Symmetry, disk membership of stored pairs, channel range and bucket placement.
    pub fn check_invariants(&self) -> Result<()> {
        let broken = |what: &str| {
            Err(Error::invalid(
                "interference db",
                alloc::string::String::from(what),
            ))
        };
        for (&pu, rec) in &self.pus {
            for su in &rec.guard {
                let Some(s) = self.sus.get(su) else {
                    return broken("guard set names a missing SU");
                };
                if s.interferers.binary_search(&pu).is_err() {
                    return broken("relation is not symmetric");
                }
                if self.distance(&rec.pos, &s.pos) > self.r_p {
                    return broken("pair farther apart than r_p");
                }
            }
            if self.buckets[rec.cell].pus.binary_search(&pu).is_err() {
                return broken("PU missing from its bucket");
            }
            self.check_channel(rec.channel)?;
        }
        for (&su, rec) in &self.sus {
            for pu in &rec.interferers {
                let Some(p) = self.pus.get(pu) else {
                    return broken("interferer set names a missing PU");
                };
                if p.guard.binary_search(&su).is_err() {
                    return broken("relation is not symmetric");
                }
            }
            if self.buckets[rec.cell].sus.binary_search(&su).is_err() {
                return broken("SU missing from its bucket");
            }
            self.check_channel(rec.channel)?;
        }
        Ok(())
    }
}

fn insert_sorted(v: &mut Vec<u32>, id: u32) {
    if let Err(pos) = v.binary_search(&id) {
        v.insert(pos, id);
    }
}

fn remove_sorted(v: &mut Vec<u32>, id: u32) {
    if let Ok(pos) = v.binary_search(&id) {
        v.remove(pos);
    }
}

/// Builds the relation for a fixed population.
pub fn build_interference_db(
    pus: &[PuSpec],
    sus: &[SuSpec],
    spatial: &SpatialParams,
    n_channels: u32,
) -> Result<InterferenceDb> {
    let mut db = InterferenceDb::new(spatial, n_channels)?;
    for &su in sus {
        db.add_su(su)?;
    }
    for &pu in pus {
        db.add_pu(pu)?;
    }
    Ok(db)
}
