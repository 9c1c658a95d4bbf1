use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::fincat::{
    complete, fresh_name, grothendieck_construction, validate_category, Arr, CategoryError, FinCategory, FinFunctor,
    IndexedCategory, NatTransform, Obj, RawCategory,
};
use crate::presheaf::FinPresheaf;
use crate::sites::{canonical_topology, generate_from_sieves, giraud_topology, GrothendieckTopology, Sieve, SitedFunctor};

use super::ast::*;
use super::checks::CheckKind;
use super::{Diagnostic, Document};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(super) enum Ns {
    Category,
    Topology,
    Functor,
    Indexed,
    Presheaf,
    Transform,
    Site,
}

impl Ns {
    pub(super) fn label(self) -> &'static str {
        match self {
            Ns::Category => "category",
            Ns::Topology => "topology",
            Ns::Functor => "functor",
            Ns::Indexed => "indexed category",
            Ns::Presheaf => "presheaf",
            Ns::Transform => "transformation",
            Ns::Site => "site",
        }
    }
}

fn provides(decl: &Decl) -> Vec<(Ns, &Name)> {
    match decl {
        Decl::Category(d) => vec![(Ns::Category, &d.name)],
        Decl::Topology(d) => vec![(Ns::Topology, &d.name)],
        Decl::Functor(d) => vec![(Ns::Functor, &d.name)],
        Decl::Indexed(d) => {
            let mut v = vec![(Ns::Indexed, &d.name)];
            v.extend(d.total.iter().map(|n| (Ns::Category, n)));
            v.extend(d.projection.iter().map(|n| (Ns::Functor, n)));
            v
        }
        Decl::Presheaf(d) => vec![(Ns::Presheaf, &d.name)],
        Decl::Transform(d) => vec![(Ns::Transform, &d.name)],
        Decl::Site(d) => vec![(Ns::Site, &d.name)],
        Decl::Check(_) => vec![],
    }
}

fn depends(decl: &Decl) -> Vec<(Ns, &Name)> {
    match decl {
        Decl::Category(_) | Decl::Check(_) => vec![],
        Decl::Topology(d) => {
            let mut v = vec![(Ns::Category, &d.on)];
            for e in &d.entries {
                if let TopologyEntry::Giraud { functor, over } = &e.node {
                    v.push((Ns::Functor, functor));
                    v.push((Ns::Topology, over));
                }
            }
            v
        }
        Decl::Functor(d) => vec![(Ns::Category, &d.source), (Ns::Category, &d.target)],
        Decl::Indexed(d) => {
            let mut v = vec![(Ns::Category, &d.base)];
            v.extend(d.fibers.iter().map(|f| (Ns::Category, &f.node.1)));
            v.extend(d.transports.iter().map(|t| (Ns::Functor, &t.node.1)));
            v
        }
        Decl::Presheaf(d) => vec![(Ns::Category, &d.on)],
        Decl::Transform(d) => vec![(Ns::Functor, &d.source), (Ns::Functor, &d.target)],
        Decl::Site(d) => vec![(Ns::Functor, &d.functor), (Ns::Topology, &d.source), (Ns::Topology, &d.target)],
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Pending,
    Done,
    Failed,
}

type Diags = Vec<Diagnostic>;

pub(super) fn resolve(blocks: Vec<Block>, diags: &mut Diags) -> Document {
    let mut doc = Document { blocks, ..Document::default() };
    let mut owner: HashMap<(Ns, String), usize> = HashMap::new();
    let mut status = vec![Status::Pending; doc.blocks.len()];
    for (i, b) in doc.blocks.iter().enumerate() {
        for (ns, name) in provides(&b.decl) {
            match owner.entry((ns, name.node.clone())) {
                Entry::Occupied(_) => {
                    diags.push(Diagnostic::semantic(name.span, format!("duplicate {} `{}`", ns.label(), name.node)));
                    status[i] = Status::Failed;
                }
                Entry::Vacant(slot) => {
                    slot.insert(i);
                }
            }
        }
    }
    loop {
        let mut progress = false;
        for i in 0..doc.blocks.len() {
            if status[i] != Status::Pending || matches!(doc.blocks[i].decl, Decl::Check(_)) {
                continue;
            }
            let decl = doc.blocks[i].decl.clone();
            let mut ready = true;
            for (ns, name) in depends(&decl) {
                match owner.get(&(ns, name.node.clone())) {
                    None => {
                        diags.push(Diagnostic::unresolved(name.span, format!("no {} named `{}`", ns.label(), name.node)));
                        status[i] = Status::Failed;
                    }
                    Some(&j) if status[j] == Status::Failed => status[i] = Status::Failed,
                    Some(&j) if status[j] == Status::Pending => ready = false,
                    Some(_) => {}
                }
            }
            if status[i] == Status::Failed {
                progress = true;
                continue;
            }
            if ready {
                let mut local = Vec::new();
                resolve_decl(&mut doc, &decl, &mut local);
                status[i] = if local.is_empty() { Status::Done } else { Status::Failed };
                diags.extend(local);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    for (i, b) in doc.blocks.iter().enumerate() {
        if status[i] == Status::Pending && !matches!(b.decl, Decl::Check(_)) {
            let name = b.decl.name();
            diags.push(Diagnostic::semantic(name.span, format!("`{}` is part of a cyclic reference", name.node)));
        }
    }
    for b in &doc.blocks {
        if let Decl::Check(c) = &b.decl {
            check_request(&doc, &owner, c, diags);
        }
    }
    doc
}

fn check_request(doc: &Document, owner: &HashMap<(Ns, String), usize>, c: &CheckDecl, diags: &mut Diags) {
    let Some(kind) = CheckKind::from_name(&c.kind.node) else {
        let known: Vec<&str> = CheckKind::ALL.iter().map(|k| k.name()).collect();
        diags.push(Diagnostic::semantic(
            c.kind.span,
            format!("unknown check `{}`; expected one of {}", c.kind.node, known.join(", ")),
        ));
        return;
    };
    let ns = kind.target_namespace();
    if !owner.contains_key(&(ns, c.target.node.clone())) {
        diags.push(Diagnostic::unresolved(c.target.span, format!("no {} named `{}`", ns.label(), c.target.node)));
        return;
    }
    let (lo, hi) = kind.arity();
    if c.args.len() < lo || c.args.len() > hi {
        let span = c.args.last().map_or(c.target.span, |a| a.span);
        diags.push(Diagnostic::semantic(span, format!("`check {}` takes {}", kind.name(), kind.usage())));
        return;
    }
    if let Err(d) = kind.resolve_args(doc, &c.target.node, &c.args) {
        diags.push(d);
    }
}

fn resolve_decl(doc: &mut Document, decl: &Decl, diags: &mut Diags) {
    match decl {
        Decl::Category(d) => {
            if let Some(c) = category(d, diags) {
                doc.categories.insert(d.name.node.clone(), Arc::new(c));
            }
        }
        Decl::Topology(d) => {
            if let Some(t) = topology(doc, d, diags) {
                doc.topologies.insert(d.name.node.clone(), Arc::new(t));
            }
        }
        Decl::Functor(d) => {
            if let Some(f) = functor(doc, d, diags) {
                doc.functors.insert(d.name.node.clone(), f);
            }
        }
        Decl::Indexed(d) => indexed(doc, d, diags),
        Decl::Presheaf(d) => {
            if let Some(p) = presheaf(doc, d, diags) {
                doc.presheaves.insert(d.name.node.clone(), Arc::new(p));
            }
        }
        Decl::Transform(d) => {
            let (f, g) = (&doc.functors[&d.source.node], &doc.functors[&d.target.node]);
            let src = f.source().clone();
            let tgt = f.target().clone();
            let mut comps: Vec<Option<Arr>> = vec![None; src.object_count()];
            for e in &d.components {
                let (x, a) = &e.node;
                let Some(xo) = lookup_obj(&src, x, diags) else { continue };
                let Some(aa) = lookup_arr(&tgt, a, diags) else { continue };
                comps[xo.0] = Some(aa);
            }
            if !diags.is_empty() {
                return;
            }
            let missing: Vec<&str> = src.objects().filter(|o| comps[o.0].is_none()).map(|o| src.obj_name(o)).collect();
            if !missing.is_empty() {
                diags.push(Diagnostic::semantic(d.name.span, format!("no component at {}", missing.join(", "))));
                return;
            }
            match NatTransform::new(d.name.node.clone(), f.clone(), g.clone(), comps.into_iter().flatten().collect()) {
                Ok(t) => {
                    doc.transforms.insert(d.name.node.clone(), t);
                }
                Err(e) => diags.push(Diagnostic::semantic(d.name.span, e.to_string())),
            }
        }
        Decl::Site(d) => {
            let f = doc.functors[&d.functor.node].clone();
            let k = doc.topologies[&d.source.node].clone();
            let j = doc.topologies[&d.target.node].clone();
            match SitedFunctor::new(f, k, j) {
                Ok(s) => {
                    doc.sites.insert(d.name.node.clone(), s);
                }
                Err(e) => diags.push(Diagnostic::semantic(d.name.span, e.to_string())),
            }
        }
        Decl::Check(_) => {}
    }
}

fn lookup_obj(c: &FinCategory, n: &Name, diags: &mut Diags) -> Option<Obj> {
    let o = c.obj(&n.node);
    if o.is_none() {
        diags.push(Diagnostic::unresolved(n.span, format!("no object `{}` in {}", n.node, c.name())));
    }
    o
}

fn lookup_arr(c: &FinCategory, n: &Name, diags: &mut Diags) -> Option<Arr> {
    let a = c.arr(&n.node);
    if a.is_none() {
        diags.push(Diagnostic::unresolved(n.span, format!("no arrow `{}` in {}", n.node, c.name())));
    }
    a
}

/// Adds `f.g` for every composable pair with no arrow at all between the ends.
fn synthesize_composites(raw: &mut RawCategory) {
    loop {
        let mut progress = false;
        let n = raw.arrows.len();
        for fi in 0..n {
            for gi in 0..n {
                let (f, fs, ft) = raw.arrows[fi].clone();
                let (g, gs, gt) = raw.arrows[gi].clone();
                if gt != fs || gs == ft {
                    continue;
                }
                if raw.compositions.iter().any(|(a, b, _)| *a == f && *b == g) {
                    continue;
                }
                if raw.arrows.iter().any(|(_, s, t)| *s == gs && *t == ft) {
                    continue;
                }
                let name = fresh_name(&format!("{f}.{g}"), |x| raw.arrows.iter().any(|(a, _, _)| a == x));
                raw.arrows.push((name.clone(), gs, ft));
                raw.compositions.push((f, g, name));
                progress = true;
            }
        }
        if !progress {
            return;
        }
    }
}

fn category(d: &CategoryDecl, diags: &mut Diags) -> Option<FinCategory> {
    let before = diags.len();
    let mut objects: Vec<String> = Vec::new();
    for o in &d.objects {
        if objects.contains(&o.node) {
            diags.push(Diagnostic::semantic(o.span, format!("duplicate object `{}`", o.node)));
        } else {
            objects.push(o.node.clone());
        }
    }
    let mut arrows: Vec<(String, String, String)> = Vec::new();
    for e in &d.arrows {
        let (f, a, b) = &e.node;
        for end in [a, b] {
            if !objects.contains(&end.node) {
                diags.push(Diagnostic::unresolved(end.span, format!("no object `{}` in {}", end.node, d.name.node)));
            }
        }
        if arrows.iter().any(|x| x.0 == f.node) {
            diags.push(Diagnostic::semantic(f.span, format!("duplicate arrow `{}`", f.node)));
            continue;
        }
        arrows.push((f.node.clone(), a.node.clone(), b.node.clone()));
    }
    let known = |n: &str| {
        arrows.iter().any(|x| x.0 == n) || n.strip_prefix("id_").is_some_and(|o| objects.iter().any(|x| x == o))
    };
    let mut compositions = Vec::new();
    for e in &d.compositions {
        let (f, g, h) = &e.node;
        for n in [f, g, h] {
            if !known(&n.node) {
                diags.push(Diagnostic::unresolved(n.span, format!("no arrow `{}` in {}", n.node, d.name.node)));
            }
        }
        compositions.push((f.node.clone(), g.node.clone(), h.node.clone()));
    }
    if diags.len() > before {
        return None;
    }
    let mut raw = RawCategory { name: d.name.node.clone(), objects, arrows, identities: Vec::new(), compositions };
    synthesize_composites(&mut raw);
    let result = complete(raw).and_then(|r| validate_category(&r));
    match result {
        Ok(c) => Some(c),
        Err(e) => {
            let witnesses: Vec<String> = match &e {
                CategoryError::MalformedTable { arrows, .. } => arrows.clone(),
                CategoryError::LawViolation { witness, .. } => witness.clone(),
            };
            let span = d
                .compositions
                .iter()
                .find(|c| [&c.node.0, &c.node.1, &c.node.2].iter().any(|n| witnesses.contains(&n.node)))
                .map(|c| c.span)
                .or_else(|| d.arrows.iter().find(|a| witnesses.contains(&a.node.0.node)).map(|a| a.span))
                .unwrap_or(d.name.span);
            diags.push(Diagnostic::semantic(span, e.to_string()));
            None
        }
    }
}

fn sieve_of(c: &FinCategory, object: &Name, arrows: &[Name], diags: &mut Diags) -> Option<Sieve> {
    let o = lookup_obj(c, object, diags)?;
    let mut gens = Vec::new();
    for a in arrows {
        let f = lookup_arr(c, a, diags)?;
        if c.tgt(f) != o {
            diags.push(Diagnostic::semantic(a.span, format!("`{}` does not end at `{}`", a.node, object.node)));
            return None;
        }
        gens.push(f);
    }
    Some(Sieve::generated(c, o, gens))
}

fn topology(doc: &Document, d: &TopologyDecl, diags: &mut Diags) -> Option<GrothendieckTopology> {
    let c = doc.categories[&d.on.node].clone();
    let name = d.name.node.clone();
    let mut base: Option<GrothendieckTopology> = None;
    let mut covers = Vec::new();
    let mut generated = Vec::new();
    for e in &d.entries {
        let start = match &e.node {
            TopologyEntry::Trivial => Some(GrothendieckTopology::trivial(c.clone())),
            TopologyEntry::Maximal => Some(GrothendieckTopology::maximal(c.clone())),
            TopologyEntry::Canonical => Some(canonical_topology(c.clone())),
            TopologyEntry::Giraud { functor, over } => {
                let p = &doc.functors[&functor.node];
                let j = &doc.topologies[&over.node];
                if **p.source() != *c {
                    diags.push(Diagnostic::semantic(
                        functor.span,
                        format!("`{}` does not start at {}", functor.node, d.on.node),
                    ));
                    return None;
                }
                match giraud_topology(p, j) {
                    Ok(t) => Some(t),
                    Err(err) => {
                        diags.push(Diagnostic::semantic(e.span, err.to_string()));
                        return None;
                    }
                }
            }
            TopologyEntry::Cover { object, arrows } => {
                covers.push(sieve_of(&c, object, arrows, diags)?);
                None
            }
            TopologyEntry::Generate { object, arrows } => {
                generated.push(sieve_of(&c, object, arrows, diags)?);
                None
            }
        };
        if let Some(t) = start {
            if base.is_some() {
                diags.push(Diagnostic::semantic(e.span, "a topology takes at most one of trivial, maximal, canonical, giraud"));
                return None;
            }
            base = Some(t);
        }
    }
    let mut sieves: Vec<Sieve> = base.map(|t| t.all_covers().cloned().collect()).unwrap_or_default();
    sieves.extend(covers);
    Some(if generated.is_empty() {
        GrothendieckTopology::from_covers(name, c, sieves)
    } else {
        sieves.extend(generated);
        generate_from_sieves(c, sieves).with_name(name)
    })
}

fn functor(doc: &Document, d: &FunctorDecl, diags: &mut Diags) -> Option<FinFunctor> {
    let (s, t) = (doc.categories[&d.source.node].clone(), doc.categories[&d.target.node].clone());
    let before = diags.len();
    let mut objs = Vec::new();
    let mut seen = HashSet::new();
    for e in &d.objects {
        let (x, y) = &e.node;
        if lookup_obj(&s, x, diags).is_some() && lookup_obj(&t, y, diags).is_some() {
            if !seen.insert(("o", x.node.clone())) {
                diags.push(Diagnostic::semantic(e.span, format!("`{}` is mapped twice", x.node)));
            }
            objs.push((x.node.as_str(), y.node.as_str()));
        }
    }
    let mut arrs = Vec::new();
    for e in &d.arrows {
        let (x, y) = &e.node;
        if lookup_arr(&s, x, diags).is_some() && lookup_arr(&t, y, diags).is_some() {
            if !seen.insert(("a", x.node.clone())) {
                diags.push(Diagnostic::semantic(e.span, format!("`{}` is mapped twice", x.node)));
            }
            arrs.push((x.node.as_str(), y.node.as_str()));
        }
    }
    if diags.len() > before {
        return None;
    }
    match FinFunctor::from_names(d.name.node.clone(), s, t, &objs, &arrs) {
        Ok(f) => Some(f),
        Err(e) => {
            diags.push(Diagnostic::semantic(d.name.span, e.to_string()));
            None
        }
    }
}

fn indexed(doc: &mut Document, d: &IndexedDecl, diags: &mut Diags) {
    let base = doc.categories[&d.base.node].clone();
    let before = diags.len();
    let mut fibers: Vec<Option<Arc<FinCategory>>> = vec![None; base.object_count()];
    for e in &d.fibers {
        let (o, cat) = &e.node;
        if let Some(o) = lookup_obj(&base, o, diags) {
            if fibers[o.0].replace(doc.categories[&cat.node].clone()).is_some() {
                diags.push(Diagnostic::semantic(e.span, "fiber given twice"));
            }
        }
    }
    let missing: Vec<&str> = base.objects().filter(|o| fibers[o.0].is_none()).map(|o| base.obj_name(o)).collect();
    if !missing.is_empty() {
        diags.push(Diagnostic::semantic(d.name.span, format!("no fiber over {}", missing.join(", "))));
    }
    if diags.len() > before {
        return;
    }
    let fibers: Vec<Arc<FinCategory>> = fibers.into_iter().flatten().collect();
    let mut transport: Vec<Option<FinFunctor>> = vec![None; base.arrow_count()];
    for o in base.objects() {
        transport[base.id(o).0] = Some(FinFunctor::identity(fibers[o.0].clone()));
    }
    for e in &d.transports {
        let (a, f) = &e.node;
        if let Some(a) = lookup_arr(&base, a, diags) {
            transport[a.0] = Some(doc.functors[&f.node].clone());
        }
    }
    if diags.len() > before {
        return;
    }
    // transport along a composite is the composite of transports
    loop {
        let mut progress = false;
        for f in base.arrows() {
            for &g in base.arrows_into(base.src(f)) {
                let fg = base.comp(f, g);
                if transport[fg.0].is_some() {
                    continue;
                }
                if let (Some(tf), Some(tg)) = (&transport[f.0], &transport[g.0]) {
                    if let Ok(t) = tg.after(tf) {
                        transport[fg.0] = Some(t);
                        progress = true;
                    }
                }
            }
        }
        if !progress {
            break;
        }
    }
    let missing: Vec<&str> = base.arrows().filter(|a| transport[a.0].is_none()).map(|a| base.arr_name(a)).collect();
    if !missing.is_empty() {
        diags.push(Diagnostic::semantic(d.name.span, format!("no transport along {}", missing.join(", "))));
        return;
    }
    let ic = match IndexedCategory::new(d.name.node.clone(), base, fibers, transport.into_iter().flatten().collect()) {
        Ok(ic) => ic,
        Err(e) => {
            diags.push(Diagnostic::semantic(d.name.span, e.to_string()));
            return;
        }
    };
    let gf = grothendieck_construction(&ic);
    if let Some(t) = &d.total {
        doc.categories.insert(t.node.clone(), gf.total.clone());
    }
    if let Some(p) = &d.projection {
        doc.functors.insert(p.node.clone(), gf.projection.clone().with_name(p.node.clone()));
    }
    doc.fibrations.insert(d.name.node.clone(), gf);
    doc.indexed.insert(d.name.node.clone(), ic);
}

fn presheaf(doc: &Document, d: &PresheafDecl, diags: &mut Diags) -> Option<FinPresheaf> {
    let c = doc.categories[&d.on.node].clone();
    let before = diags.len();
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); c.object_count()];
    let mut given = vec![false; c.object_count()];
    for e in &d.elements {
        let (o, xs) = &e.node;
        let Some(o) = lookup_obj(&c, o, diags) else { continue };
        if std::mem::replace(&mut given[o.0], true) {
            diags.push(Diagnostic::semantic(e.span, "elements given twice"));
            continue;
        }
        for x in xs {
            if labels[o.0].contains(&x.node) {
                diags.push(Diagnostic::semantic(x.span, format!("duplicate element `{}`", x.node)));
            }
            labels[o.0].push(x.node.clone());
        }
    }
    let mut action: Vec<Vec<Option<usize>>> =
        c.arrows().map(|f| vec![None; labels[c.tgt(f).0].len()]).collect();
    for o in c.objects() {
        action[c.id(o).0] = (0..labels[o.0].len()).map(Some).collect();
    }
    for e in &d.actions {
        let (f, x, y) = &e.node;
        let Some(fa) = lookup_arr(&c, f, diags) else { continue };
        let (s, t) = (c.src(fa), c.tgt(fa));
        let xi = labels[t.0].iter().position(|l| *l == x.node);
        let yi = labels[s.0].iter().position(|l| *l == y.node);
        match (xi, yi) {
            (Some(xi), Some(yi)) => {
                if action[fa.0][xi].replace(yi).is_some() && !c.is_identity(fa) {
                    diags.push(Diagnostic::semantic(e.span, format!("action of `{}` on `{}` given twice", f.node, x.node)));
                }
            }
            (None, _) => diags.push(Diagnostic::unresolved(
                x.span,
                format!("no element `{}` over `{}`", x.node, c.obj_name(t)),
            )),
            (_, None) => diags.push(Diagnostic::unresolved(
                y.span,
                format!("no element `{}` over `{}`", y.node, c.obj_name(s)),
            )),
        }
    }
    if diags.len() > before {
        return None;
    }
    let mut full = Vec::new();
    for f in c.arrows() {
        let mut row = Vec::new();
        for (x, v) in action[f.0].iter().enumerate() {
            match v {
                Some(y) => row.push(*y),
                None => {
                    diags.push(Diagnostic::semantic(
                        d.name.span,
                        format!("action of `{}` on `{}` is not given", c.arr_name(f), labels[c.tgt(f).0][x]),
                    ));
                    return None;
                }
            }
        }
        full.push(row);
    }
    match FinPresheaf::new(d.name.node.clone(), c, labels, full) {
        Ok(p) => Some(p),
        Err(e) => {
            diags.push(Diagnostic::semantic(d.name.span, e.to_string()));
            None
        }
    }
}
