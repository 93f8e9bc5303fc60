//! Time-space diagram export: node stocks, rider arcs and trike relocation
//! arcs, as JSON for plotting tools or as Graphviz DOT.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::flows::FlowSolution;
use crate::instance::Instance;
use crate::timespace::travel_periods;

/// Past this size a drawing is unreadable anyway.
pub const MAX_DIAGRAM_SITES: usize = 50;
pub const MAX_DIAGRAM_PERIODS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagramFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramSite {
    pub id: String,
    pub x_m: f64,
    pub y_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramNode {
    pub site: usize,
    pub period: usize,
    pub bikes: f64,
    pub trikes: f64,
    /// Bikes arriving at this node (riders plus relocated).
    pub inflow: f64,
    /// Bikes leaving this node (riders plus relocated).
    pub outflow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiderArc {
    pub from: usize,
    pub to: usize,
    pub depart: usize,
    pub arrive: usize,
    pub riders: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrikeArc {
    pub from: usize,
    pub to: usize,
    pub depart: usize,
    pub arrive: usize,
    pub trikes: f64,
    /// Bikes carried on this hop; zero for an empty repositioning trip.
    pub bikes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub sites: Vec<DiagramSite>,
    pub start_clock: u32,
    pub interval_minutes: u32,
    pub periods: usize,
    pub nodes: Vec<DiagramNode>,
    pub rider_arcs: Vec<RiderArc>,
    pub trike_arcs: Vec<TrikeArc>,
}

pub fn build_diagram(instance: &Instance, flows: &FlowSolution) -> Result<Diagram> {
    let s = instance.num_sites();
    let horizon = instance.num_periods();
    if s > MAX_DIAGRAM_SITES || horizon > MAX_DIAGRAM_PERIODS {
        return Err(invalid(format!(
            "{s} sites x {horizon} periods is too large to draw (limit {MAX_DIAGRAM_SITES} x {MAX_DIAGRAM_PERIODS}); \
             cut the horizon or the site set before exporting"
        )));
    }
    let shape_ok = |v: &Vec<Vec<f64>>| v.len() == s && v.iter().all(|r| r.len() == horizon + 1);
    if !shape_ok(&flows.bike_stock) || !shape_ok(&flows.trike_stock) {
        return Err(invalid("solution does not match the instance dimensions"));
    }
    let d = &instance.site_graph.distance_km;
    let interval = instance.time_grid.interval_minutes;
    let ride_tau = |i: usize, j: usize| travel_periods(d[i][j], instance.bike_speed_kmh, interval);
    let hop_tau = |i: usize, j: usize| travel_periods(d[i][j], instance.trike_speed_kmh, interval);

    let mut inflow = vec![vec![0.0; horizon + 1]; s];
    let mut outflow = vec![vec![0.0; horizon + 1]; s];
    let mut rider_arcs = Vec::new();
    for m in &flows.rider_moves {
        check_move(m.from, m.to, s)?;
        let arrive = m.depart + ride_tau(m.from, m.to)?;
        if arrive > horizon {
            return Err(invalid(format!("rider arc {} -> {} at {} ends past the horizon", m.from, m.to, m.depart)));
        }
        outflow[m.from][m.depart] += m.amount;
        inflow[m.to][arrive] += m.amount;
        rider_arcs.push(RiderArc { from: m.from, to: m.to, depart: m.depart, arrive, riders: m.amount });
    }

    let mut hops: BTreeMap<(usize, usize, usize), (f64, f64)> = BTreeMap::new();
    for m in &flows.trike_moves {
        check_move(m.from, m.to, s)?;
        hops.entry((m.from, m.to, m.depart)).or_default().0 += m.amount;
    }
    for m in &flows.bike_moves {
        check_move(m.from, m.to, s)?;
        hops.entry((m.from, m.to, m.depart)).or_default().1 += m.amount;
    }
    let mut trike_arcs = Vec::new();
    for ((from, to, depart), (trikes, bikes)) in hops {
        let arrive = depart + hop_tau(from, to)?;
        if arrive > horizon {
            return Err(invalid(format!("relocation arc {from} -> {to} at {depart} ends past the horizon")));
        }
        outflow[from][depart] += bikes;
        inflow[to][arrive] += bikes;
        trike_arcs.push(TrikeArc { from, to, depart, arrive, trikes, bikes });
    }

    let mut nodes = Vec::with_capacity(s * (horizon + 1));
    for t in 0..=horizon {
        for i in 0..s {
            nodes.push(DiagramNode {
                site: i,
                period: t,
                bikes: flows.bike_stock[i][t],
                trikes: flows.trike_stock[i][t],
                inflow: inflow[i][t],
                outflow: outflow[i][t],
            });
        }
    }
    Ok(Diagram {
        sites: instance
            .site_graph
            .sites
            .iter()
            .map(|site| DiagramSite { id: site.id.clone(), x_m: site.x_m, y_m: site.y_m })
            .collect(),
        start_clock: instance.time_grid.start_clock,
        interval_minutes: interval,
        periods: horizon,
        nodes,
        rider_arcs,
        trike_arcs,
    })
}

fn check_move(from: usize, to: usize, sites: usize) -> Result<()> {
    if from >= sites || to >= sites {
        return Err(invalid(format!("movement {from} -> {to} references a missing site")));
    }
    Ok(())
}

fn num(v: f64) -> String {
    if v == v.round() {
        format!("{}", v as i64)
    } else {
        format!("{v:.3}")
    }
}

impl Diagram {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    /// Sites run down the page, periods left to right; node labels are the
    /// bike stock, trike arcs are bold and labelled with their load.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph timespace {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n");
        for n in &self.nodes {
            let id = &self.sites[n.site].id;
            let _ = writeln!(
                out,
                "  \"{id}@{t}\" [label=\"{b}\", pos=\"{x},{y}!\"{extra}];",
                t = n.period,
                b = num(n.bikes),
                x = n.period,
                y = -(n.site as i64),
                extra = if n.trikes > 0.0 { format!(", xlabel=\"T{}\"", num(n.trikes)) } else { String::new() },
            );
        }
        for t in 0..self.periods {
            for site in &self.sites {
                let _ = writeln!(out, "  \"{id}@{t}\" -> \"{id}@{u}\" [color=gray];", id = site.id, u = t + 1);
            }
        }
        for a in &self.rider_arcs {
            let _ = writeln!(
                out,
                "  \"{}@{}\" -> \"{}@{}\" [style=dashed, label=\"{}\"];",
                self.sites[a.from].id,
                a.depart,
                self.sites[a.to].id,
                a.arrive,
                num(a.riders)
            );
        }
        for a in &self.trike_arcs {
            let _ = writeln!(
                out,
                "  \"{}@{}\" -> \"{}@{}\" [style=bold, color=red, label=\"{} bikes\"];",
                self.sites[a.from].id,
                a.depart,
                self.sites[a.to].id,
                a.arrive,
                num(a.bikes)
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn render(&self, format: DiagramFormat) -> Result<String> {
        match format {
            DiagramFormat::Json => self.to_json(),
            DiagramFormat::Dot => Ok(self.to_dot()),
        }
    }
}
