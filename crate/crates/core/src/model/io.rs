//! Plain-text solution tables.
//!
//! - trajectory: `dc,slot,x,y,h`, one row per DC and slot;
//! - association: `user,dc`, one row per user;
//! - schedule: `user,dc,slot`, one row per served slot;
//! - iteration log: `iteration,objective,delta_g`, one row per descent step.
//!
//! Scenarios are JSON documents, see [`Scenario::to_json`].

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Association, IterationRecord, Scenario, Schedule, Trajectory};
use crate::geom::Waypoint;
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct TrajectoryRow {
    dc: usize,
    slot: usize,
    x: f64,
    y: f64,
    h: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct AssociationRow {
    user: usize,
    dc: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleRow {
    user: usize,
    dc: usize,
    slot: usize,
}

pub fn write_trajectory<W: Write>(w: W, t: &Trajectory) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (dc, path) in t.paths.iter().enumerate() {
        for (slot, p) in path.iter().enumerate() {
            out.serialize(TrajectoryRow { dc, slot, x: p.x, y: p.y, h: p.h })?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_trajectory<R: Read>(r: R, num_dcs: usize, num_slots: usize) -> Result<Trajectory> {
    let mut paths: Vec<Vec<Option<Waypoint>>> = vec![vec![None; num_slots]; num_dcs];
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: TrajectoryRow = row?;
        let cell = paths
            .get_mut(row.dc)
            .and_then(|p| p.get_mut(row.slot))
            .ok_or_else(|| Error::Parse(format!("trajectory row dc={} slot={} out of range", row.dc, row.slot)))?;
        if cell.replace(Waypoint::new(row.x, row.y, row.h)).is_some() {
            return Err(Error::Parse(format!("duplicate trajectory row dc={} slot={}", row.dc, row.slot)));
        }
    }
    let paths = paths
        .into_iter()
        .enumerate()
        .map(|(d, p)| {
            p.into_iter()
                .enumerate()
                .map(|(n, w)| w.ok_or_else(|| Error::Parse(format!("missing trajectory row dc={d} slot={n}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(paths))
}

pub fn write_association<W: Write>(w: W, a: &Association) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (user, &dc) in a.dc_of.iter().enumerate() {
        out.serialize(AssociationRow { user, dc })?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_association<R: Read>(r: R, num_users: usize) -> Result<Association> {
    let mut dc_of = vec![None; num_users];
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: AssociationRow = row?;
        let cell = dc_of
            .get_mut(row.user)
            .ok_or_else(|| Error::Parse(format!("association user {} out of range", row.user)))?;
        if cell.replace(row.dc).is_some() {
            return Err(Error::Parse(format!("user {} associated twice", row.user)));
        }
    }
    let dc_of = dc_of
        .into_iter()
        .enumerate()
        .map(|(u, d)| d.ok_or_else(|| Error::Parse(format!("user {u} has no association row"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Association::new(dc_of))
}

pub fn write_schedule<W: Write>(w: W, k: &Schedule) -> Result<()> {
    let mut rows: Vec<ScheduleRow> = Vec::new();
    for (dc, row) in k.served.iter().enumerate() {
        for (slot, &cell) in row.iter().enumerate() {
            if let Some(user) = cell {
                rows.push(ScheduleRow { user, dc, slot });
            }
        }
    }
    rows.sort_by_key(|r| (r.user, r.dc, r.slot));
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_schedule<R: Read>(r: R, num_dcs: usize, num_slots: usize) -> Result<Schedule> {
    let mut k = Schedule::idle(num_dcs, num_slots);
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: ScheduleRow = row?;
        let cell = k
            .served
            .get_mut(row.dc)
            .and_then(|p| p.get_mut(row.slot))
            .ok_or_else(|| Error::Parse(format!("schedule row dc={} slot={} out of range", row.dc, row.slot)))?;
        if cell.replace(row.user).is_some() {
            return Err(Error::Parse(format!("dc {} serves two users in slot {}", row.dc, row.slot)));
        }
    }
    Ok(k)
}

pub fn write_iterations<W: Write>(w: W, history: &[IterationRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in history {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_iterations<R: Read>(r: R) -> Result<Vec<IterationRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<IterationRecord>, _>>()?)
}

pub fn save_scenario(path: &Path, s: &Scenario) -> Result<()> {
    std::fs::write(path, s.to_json()?)?;
    Ok(())
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    Scenario::from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn tables_round_trip(
            coords in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3, 0f64..1e3), 12),
            dc_of in prop::collection::vec(0usize..3, 7),
            cells in prop::collection::vec(prop::option::of(0usize..7), 12),
        ) {
            let t = Trajectory::new(coords.chunks(4).map(|c| c.iter().map(|&(x, y, h)| Waypoint::new(x, y, h)).collect()).collect());
            let a = Association::new(dc_of);
            let k = Schedule { served: cells.chunks(4).map(|c| c.to_vec()).collect() };

            let mut buf = Vec::new();
            write_trajectory(&mut buf, &t).unwrap();
            prop_assert_eq!(read_trajectory(&buf[..], 3, 4).unwrap(), t);

            let mut buf = Vec::new();
            write_association(&mut buf, &a).unwrap();
            prop_assert_eq!(read_association(&buf[..], 7).unwrap(), a);

            let mut buf = Vec::new();
            write_schedule(&mut buf, &k).unwrap();
            prop_assert_eq!(read_schedule(&buf[..], 3, 4).unwrap(), k);
        }
    }

    #[test]
    fn iteration_log_round_trips() {
        let h = vec![
            IterationRecord { iteration: 1, objective: 1234.5678901234, delta_g: 87.25 },
            IterationRecord { iteration: 2, objective: 1200.0, delta_g: 0.0625 },
        ];
        let mut buf = Vec::new();
        write_iterations(&mut buf, &h).unwrap();
        assert!(buf.starts_with(b"iteration,objective,delta_g\n"));
        assert_eq!(read_iterations(buf.as_slice()).unwrap(), h);
    }

    #[test]
    fn rejects_double_booked_slot() {
        let text = "user,dc,slot\n0,0,1\n1,0,1\n";
        assert!(matches!(read_schedule(text.as_bytes(), 1, 2), Err(Error::Parse(_))));
    }

    #[test]
    fn rejects_missing_trajectory_row() {
        let text = "dc,slot,x,y,h\n0,0,1,2,3\n";
        assert!(read_trajectory(text.as_bytes(), 1, 2).is_err());
    }
}
