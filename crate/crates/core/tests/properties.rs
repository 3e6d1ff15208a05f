use proptest::prelude::*;

use flagcoh::coherence::{
    before, is_clique, lollipop, negation, par, relation_equal, tensor, CoherenceSpace, Rel3, Token,
};
use flagcoh::flag::{flag_rel3, flag_self_duality_check, split};
use flagcoh::hyper::{hc_negation, hc_relation_equal, HFlag, Hyper, Hypercoherence};
use flagcoh::proofnet::{
    all_matchings, catalog_interpretations, dicograph_of, experiments, parse_formula,
    semantic_correctness_check, Connective, Formula, ProofStructure,
};
use flagcoh::suites::{all_hypercoherences, all_spaces};
use flagcoh::trees::{common_refinement, first_difference, BitWord, GenericTree, Term};

const ALPHABET: [&str; 3] = ["a", "b", "c"];

type Tree = GenericTree<Token>;

fn tok(i: usize) -> Token {
    Token::atom(ALPHABET[i])
}

fn term(k: usize, depth: u32) -> impl Strategy<Value = Term<Token>> {
    (0..k)
        .prop_map(|i| Term::leaf(tok(i)))
        .prop_recursive(depth, 64, 2, |inner| {
            (inner.clone(), inner).prop_map(|(l, r)| Term::node(l, r))
        })
}

fn tree(k: usize, depth: u32) -> impl Strategy<Value = Tree> {
    term(k, depth).prop_map(Term::normalize)
}

fn word() -> impl Strategy<Value = BitWord> {
    prop::collection::vec(any::<bool>(), 0..7).prop_map(BitWord::from_bits)
}

/// A base space on `n` tokens, indexed by its set of strictly coherent pairs.
fn space(n: usize) -> impl Strategy<Value = CoherenceSpace> {
    let spaces = all_spaces(&ALPHABET[..n]);
    (0..spaces.len()).prop_map(move |i| spaces[i].clone())
}

fn any_space() -> impl Strategy<Value = CoherenceSpace> {
    (1usize..=3).prop_flat_map(space)
}

/// Value of a raw term at `m·0^ω`.
fn eval_term<'a>(t: &'a Term<Token>, m: &BitWord) -> &'a Token {
    let mut cur = t;
    let mut i = 0;
    while let Term::Node(l, r) = cur {
        cur = if m.padded_bit(i) { r } else { l };
        i += 1;
    }
    match cur {
        Term::Leaf(x) => x,
        Term::Node(..) => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normal_forms_are_normal_and_stable(t in term(3, 6)) {
        let n = t.clone().normalize();
        prop_assert!(n.term().is_normal());
        prop_assert_eq!(n.clone().into_term().normalize(), n);
    }

    #[test]
    fn any_reduction_order_reaches_the_normal_form(t in term(2, 6), picks in prop::collection::vec(any::<usize>(), 64)) {
        let mut cur = t.clone();
        let mut step = 0;
        loop {
            let redexes = cur.redex_positions();
            if redexes.is_empty() {
                break;
            }
            let at = &redexes[picks[step % picks.len()] % redexes.len()];
            cur = cur.reduce_at(at).expect("listed redex");
            step += 1;
        }
        prop_assert_eq!(GenericTree::from_term(cur.clone()), t.normalize());
        prop_assert!(cur.is_normal());
    }

    #[test]
    fn normalization_preserves_values(t in term(3, 6), m in word()) {
        let n = t.clone().normalize();
        prop_assert_eq!(n.eval(&m), eval_term(&t, &m));
    }

    #[test]
    fn pairs_round_trip(f in tree(3, 6)) {
        let cover = f.to_pairs();
        prop_assert!(cover.check_partition().is_ok());
        prop_assert!(cover.siblings_distinct());
        prop_assert_eq!(GenericTree::from_pairs(&cover).unwrap(), f);
    }

    #[test]
    fn first_difference_is_the_least_disagreement(f in tree(3, 5), g in tree(3, 5)) {
        let d = first_difference(&f, &g);
        prop_assert_eq!(&d, &first_difference(&g, &f));
        let pieces = common_refinement(&f, &g);
        let expected = pieces.iter().find(|(_, x, y)| x != y).map(|(w, _, _)| w.clone());
        prop_assert_eq!(d.is_none(), f == g);
        if let (Some(d), Some(w)) = (&d, &expected) {
            prop_assert_ne!(f.eval(d), g.eval(d));
            prop_assert_eq!(d.point_cmp(w), std::cmp::Ordering::Equal);
        }
    }

    #[test]
    fn split_and_merge_are_inverse(f in tree(3, 6)) {
        let (h0, h1) = split(&f);
        prop_assert_eq!(GenericTree::merge(h0, h1), f);
    }

    #[test]
    fn flag_is_self_dual(a in (2usize..=3).prop_flat_map(space), f in tree(2, 6), g in tree(2, 6)) {
        prop_assert!(flag_self_duality_check(&a, [(&f, &g)]).unwrap());
    }

    #[test]
    fn flag_contraction_preserves_relations(a in space(2), h in tree(2, 6), g in tree(2, 6)) {
        let (h0, h1) = split(&h);
        let (g0, g1) = split(&g);
        let halves = Rel3::before(flag_rel3(&a, &h0, &g0).unwrap(), flag_rel3(&a, &h1, &g1).unwrap());
        prop_assert_eq!(flag_rel3(&a, &h, &g).unwrap(), halves);
    }

    #[test]
    fn de_morgan_and_negation(a in any_space(), b in any_space()) {
        prop_assert_eq!(negation(&negation(&a)), a.clone());
        prop_assert!(relation_equal(&negation(&tensor(&a, &b)).materialize(), &par(&negation(&a), &negation(&b))));
        prop_assert!(relation_equal(&negation(&before(&a, &b)).materialize(), &before(&negation(&a), &negation(&b))));
        prop_assert!(relation_equal(&lollipop(&a, &b).materialize(), &par(&negation(&a), &b)));
    }

    #[test]
    fn before_cliques_sit_between(a in any_space(), b in any_space(), mask in any::<u16>()) {
        let web = tensor(&a, &b).web();
        let chosen: Vec<Token> = web.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, t)| t.clone()).collect();
        if is_clique(&tensor(&a, &b), chosen.iter()) {
            prop_assert!(is_clique(&before(&a, &b), chosen.iter()));
        }
        if is_clique(&before(&a, &b), chosen.iter()) {
            prop_assert!(is_clique(&par(&a, &b), chosen.iter()));
        }
    }

    #[test]
    fn hypercoherence_negation_is_involutive(i in 0usize..16) {
        let x = &all_hypercoherences(&ALPHABET)[i];
        prop_assert!(hc_relation_equal(&hc_negation(&hc_negation(x)), x).unwrap());
        prop_assert_eq!(hc_negation(&hc_negation(x)), x.clone());
    }

    #[test]
    fn hflag_is_self_dual(i in 0usize..16, family in prop::collection::btree_set(tree(3, 4), 2..5)) {
        let x: Hypercoherence = all_hypercoherences(&ALPHABET)[i].clone();
        let here = HFlag::new(&x).in_gamma_star(&family).unwrap();
        let there = HFlag::new(&hc_negation(&x)).in_gamma_star(&family).unwrap();
        prop_assert_ne!(here, there);
    }
}

/// Builds a formula over `atoms` with bracketing and connectives drawn from
/// `choices`.
fn build(
    atoms: &[(usize, bool)],
    lo: usize,
    hi: usize,
    choices: &[u8],
    next: &mut usize,
) -> Formula {
    if hi - lo == 1 {
        let (var, positive) = atoms[lo];
        return Formula::atom(ALPHABET[var], positive, lo);
    }
    let c = choices[*next % choices.len()] as usize;
    *next += 1;
    let mid = lo + 1 + c % (hi - lo - 1);
    let connective = Connective::ALL[(c / 7) % 3];
    let left = build(atoms, lo, mid, choices, next);
    let right = build(atoms, mid, hi, choices, next);
    Formula::binary(connective, left, right)
}

fn structure() -> impl Strategy<Value = ProofStructure> {
    let atoms = (1usize..=3).prop_flat_map(|pairs| {
        let vars = prop::collection::vec(0usize..3, pairs);
        vars.prop_flat_map(|vars| {
            let atoms: Vec<(usize, bool)> =
                vars.iter().flat_map(|&v| [(v, true), (v, false)]).collect();
            Just(atoms).prop_shuffle()
        })
    });
    (
        atoms,
        prop::collection::vec(any::<u8>(), 8),
        any::<prop::sample::Index>(),
    )
        .prop_map(|(atoms, choices, pick)| {
            let f = build(&atoms, 0, atoms.len(), &choices, &mut 0);
            let matchings = all_matchings(&f);
            let links = pick.get(&matchings).clone();
            ProofStructure::new(f, &links, Vec::new()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dicographs_ignore_rewrites(s in structure(), steps in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 0..12)) {
        let mut f = s.formula().clone();
        for (at, commute) in steps {
            let paths = f.binary_paths();
            if paths.is_empty() {
                break;
            }
            let path = at.get(&paths).clone();
            if commute { f.commute_at(&path); } else { f.reassociate_at(&path); }
        }
        prop_assert_eq!(&dicograph_of(&f), s.dicograph());
        let t = ProofStructure::new(f, &s.links(), Vec::new()).unwrap();
        let interp = catalog_interpretations(&s.formula().variables()).pop().unwrap();
        prop_assert_eq!(experiments(&t, &interp).unwrap().len(), experiments(&s, &interp).unwrap().len());
    }

    #[test]
    fn formulas_print_and_parse_back(s in structure()) {
        let f = s.formula();
        prop_assert_eq!(parse_formula(&f.to_ascii()).unwrap(), f.clone());
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f.clone());
        prop_assert_eq!(f.dual().dual(), f.clone());
    }

    #[test]
    fn criterion_agrees_with_the_catalog(s in structure()) {
        let catalog = catalog_interpretations(&s.formula().variables());
        let report = semantic_correctness_check(&s, &catalog).unwrap();
        prop_assert_eq!(report.agreement(true), Some(true), "{}", s);
    }
}

#[test]
fn experiments_count_is_the_product_of_webs() {
    let f = parse_formula("(a|~a)|(b;~b)").unwrap();
    let s = ProofStructure::new(f, &[(0, 1), (2, 3)], Vec::new()).unwrap();
    let interp = catalog_interpretations(&s.formula().variables())
        .into_iter()
        .find(|i| i.get("a").unwrap().web_size() == 3 && i.get("b").unwrap().web_size() == 2)
        .unwrap();
    assert_eq!(experiments(&s, &interp).unwrap().len(), 6);
    let empty = flagcoh::proofnet::AtomInterpretation::new()
        .with(
            "a",
            CoherenceSpace::new(Vec::<Token>::new(), Vec::new()).unwrap(),
        )
        .with("b", CoherenceSpace::one());
    let results = experiments(&s, &empty).unwrap();
    assert!(results.is_empty());
    let space = flagcoh::proofnet::conclusion_space(s.formula(), &empty).unwrap();
    assert!(is_clique(&space, results.iter()));
}
