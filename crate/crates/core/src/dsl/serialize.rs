use crate::fincat::{essential_compositions, FinCategory, FinFunctor};
use crate::presheaf::FinPresheaf;
use crate::sites::{GrothendieckTopology, Sieve};

use super::ast::*;
use super::lexer::is_bare_ident;
use super::{Document, Span};

pub fn quote(name: &str) -> String {
    if is_bare_ident(name) {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

fn q(n: &Name) -> String {
    quote(&n.node)
}

fn list(names: &[Name]) -> String {
    names.iter().map(q).collect::<Vec<_>>().join(", ")
}

fn sorted_list(names: &[Name]) -> String {
    let mut v: Vec<String> = names.iter().map(q).collect();
    v.sort();
    v.dedup();
    v.join(", ")
}

fn kind_rank(d: &Decl) -> usize {
    match d {
        Decl::Category(_) => 0,
        Decl::Indexed(_) => 1,
        Decl::Functor(_) => 2,
        Decl::Topology(_) => 3,
        Decl::Presheaf(_) => 4,
        Decl::Transform(_) => 5,
        Decl::Site(_) => 6,
        Decl::Check(_) => 7,
    }
}

fn braced(header: String, groups: Vec<Vec<String>>) -> String {
    let mut out = header;
    out.push_str(" {\n");
    for mut g in groups {
        g.sort();
        for line in g {
            out.push_str("  ");
            out.push_str(&line);
            out.push('\n');
        }
    }
    out.push('}');
    out
}

fn block_text(d: &Decl) -> String {
    match d {
        Decl::Category(c) => {
            let objects = if c.objects.is_empty() { vec![] } else { vec![format!("objects: {}", list(&c.objects))] };
            let arrows = c.arrows.iter().map(|e| format!("arrow {}: {} -> {}", q(&e.node.0), q(&e.node.1), q(&e.node.2))).collect();
            let comps = c
                .compositions
                .iter()
                .map(|e| format!("compose {} . {} = {}", q(&e.node.0), q(&e.node.1), q(&e.node.2)))
                .collect();
            braced(format!("category {}", q(&c.name)), vec![objects, arrows, comps])
        }
        Decl::Topology(t) => {
            let mut base = Vec::new();
            let mut covers = Vec::new();
            let mut generated = Vec::new();
            for e in &t.entries {
                match &e.node {
                    TopologyEntry::Trivial => base.push("trivial".to_string()),
                    TopologyEntry::Maximal => base.push("maximal".to_string()),
                    TopologyEntry::Canonical => base.push("canonical".to_string()),
                    TopologyEntry::Giraud { functor, over } => base.push(format!("giraud of {} over {}", q(functor), q(over))),
                    TopologyEntry::Cover { object, arrows } => {
                        covers.push(format!("cover {} with {{ {} }}", q(object), sorted_list(arrows)).replace("{  }", "{ }"))
                    }
                    TopologyEntry::Generate { object, arrows } => generated
                        .push(format!("generate {} with {{ {} }}", q(object), sorted_list(arrows)).replace("{  }", "{ }")),
                }
            }
            covers.dedup();
            braced(format!("topology {} on {}", q(&t.name), q(&t.on)), vec![base, covers, generated])
        }
        Decl::Functor(f) => {
            let objs = f.objects.iter().map(|e| format!("obj {} -> {}", q(&e.node.0), q(&e.node.1))).collect();
            let arrs = f.arrows.iter().map(|e| format!("arr {} -> {}", q(&e.node.0), q(&e.node.1))).collect();
            braced(format!("functor {}: {} -> {}", q(&f.name), q(&f.source), q(&f.target)), vec![objs, arrs])
        }
        Decl::Indexed(i) => {
            let fibers = i.fibers.iter().map(|e| format!("fiber {} = {}", q(&e.node.0), q(&e.node.1))).collect();
            let transports = i.transports.iter().map(|e| format!("transport {} = {}", q(&e.node.0), q(&e.node.1))).collect();
            let total = i.total.iter().map(|n| format!("total {}", q(n))).collect();
            let projection = i.projection.iter().map(|n| format!("projection {}", q(n))).collect();
            braced(format!("indexed {} over {}", q(&i.name), q(&i.base)), vec![fibers, transports, total, projection])
        }
        Decl::Presheaf(p) => {
            let elements = p
                .elements
                .iter()
                .map(|e| {
                    if e.node.1.is_empty() {
                        format!("elements {}:", q(&e.node.0))
                    } else {
                        format!("elements {}: {}", q(&e.node.0), list(&e.node.1))
                    }
                })
                .collect();
            let acts = p.actions.iter().map(|e| format!("act {}: {} -> {}", q(&e.node.0), q(&e.node.1), q(&e.node.2))).collect();
            braced(format!("presheaf {} on {}", q(&p.name), q(&p.on)), vec![elements, acts])
        }
        Decl::Transform(t) => {
            let comps = t.components.iter().map(|e| format!("at {} = {}", q(&e.node.0), q(&e.node.1))).collect();
            braced(format!("transform {}: {} => {}", q(&t.name), q(&t.source), q(&t.target)), vec![comps])
        }
        Decl::Site(s) => format!("site {}: {} from {} to {}", q(&s.name), q(&s.functor), q(&s.source), q(&s.target)),
        Decl::Check(c) => {
            let mut parts = vec!["check".to_string(), c.kind.node.clone(), q(&c.target)];
            parts.extend(c.args.iter().map(q));
            parts.join(" ")
        }
    }
}

/// Canonical text: blocks ordered by kind then name, entries sorted, LF endings.
pub fn serialize_blocks(blocks: &[Block]) -> String {
    let mut items: Vec<(usize, String, String)> =
        blocks.iter().map(|b| (kind_rank(&b.decl), b.decl.name().node.clone(), block_text(&b.decl))).collect();
    items.sort();
    let mut out = String::new();
    let mut previous: Option<(usize, bool)> = None;
    for (rank, _, text) in items {
        let one_liner = !text.ends_with('}');
        // consecutive one-line declarations of one kind stay together
        if previous.is_some() && previous != Some((rank, true)) || previous.is_some() && !one_liner {
            out.push('\n');
        }
        out.push_str(&text);
        out.push('\n');
        previous = Some((rank, one_liner));
    }
    out
}

pub fn serialize(doc: &Document) -> String {
    serialize_blocks(&doc.blocks)
}

fn name(s: &str) -> Name {
    Spanned::new(s.to_string(), Span::default())
}

fn block(decl: Decl) -> Block {
    Block { decl, span: Span::default() }
}

/// Every object, every non-identity arrow and every composite of two non-identities.
pub fn category_block(label: &str, c: &FinCategory) -> Block {
    let objects = c.objects().map(|o| name(c.obj_name(o))).collect();
    let arrows = c
        .non_identity_arrows()
        .map(|a| Spanned::new((name(c.arr_name(a)), name(c.obj_name(c.src(a))), name(c.obj_name(c.tgt(a)))), Span::default()))
        .collect();
    let compositions = essential_compositions(c)
        .into_iter()
        .map(|(f, g, h)| Spanned::new((name(&f), name(&g), name(&h)), Span::default()))
        .collect();
    block(Decl::Category(CategoryDecl { name: name(label), objects, arrows, compositions }))
}

/// Drops generators already generated by the others.
fn minimal_generators(c: &FinCategory, s: &Sieve) -> Vec<String> {
    let mut gens: Vec<_> = s.members().collect();
    let mut i = 0;
    while i < gens.len() {
        let rest: Vec<_> = gens.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &a)| a).collect();
        if Sieve::generated(c, s.object(), rest.iter().copied()) == *s {
            gens.remove(i);
        } else {
            i += 1;
        }
    }
    gens.into_iter().map(|a| c.arr_name(a).to_string()).collect()
}

/// Extensional form: `trivial` or one `cover` line per non-maximal covering sieve.
pub fn topology_block(label: &str, on: &str, t: &GrothendieckTopology) -> Block {
    let c = t.base();
    let mut entries = Vec::new();
    if t.is_trivial() {
        entries.push(Spanned::new(TopologyEntry::Trivial, Span::default()));
    }
    for s in t.all_covers().filter(|s| !s.is_maximal(c)) {
        let arrows = minimal_generators(c, s).iter().map(|a| name(a)).collect();
        entries.push(Spanned::new(
            TopologyEntry::Cover { object: name(c.obj_name(s.object())), arrows },
            Span::default(),
        ));
    }
    block(Decl::Topology(TopologyDecl { name: name(label), on: name(on), entries }))
}

pub fn functor_block(label: &str, source: &str, target: &str, f: &FinFunctor) -> Block {
    let (s, t) = (f.source(), f.target());
    let objects = s
        .objects()
        .map(|o| Spanned::new((name(s.obj_name(o)), name(t.obj_name(f.obj(o)))), Span::default()))
        .collect();
    let arrows = s
        .non_identity_arrows()
        .map(|a| Spanned::new((name(s.arr_name(a)), name(t.arr_name(f.arr(a)))), Span::default()))
        .collect();
    block(Decl::Functor(FunctorDecl { name: name(label), source: name(source), target: name(target), objects, arrows }))
}

pub fn presheaf_block(label: &str, on: &str, p: &FinPresheaf) -> Block {
    let c = p.base();
    let elements = c
        .objects()
        .map(|o| Spanned::new((name(c.obj_name(o)), p.labels(o).iter().map(|l| name(l)).collect()), Span::default()))
        .collect();
    let mut actions = Vec::new();
    for f in c.non_identity_arrows() {
        let (s, t) = (c.src(f), c.tgt(f));
        for x in 0..p.size(t) {
            actions.push(Spanned::new(
                (name(c.arr_name(f)), name(p.label(t, x)), name(p.label(s, p.act(f, x)))),
                Span::default(),
            ));
        }
    }
    block(Decl::Presheaf(PresheafDecl { name: name(label), on: name(on), elements, actions }))
}

pub fn site_block(label: &str, functor: &str, source: &str, target: &str) -> Block {
    block(Decl::Site(SiteDecl { name: name(label), functor: name(functor), source: name(source), target: name(target) }))
}

pub fn check_block(kind: &str, target: &str, args: &[&str]) -> Block {
    block(Decl::Check(CheckDecl { kind: name(kind), target: name(target), args: args.iter().map(|a| name(a)).collect() }))
}
