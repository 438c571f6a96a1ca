mod support;

#[test]
fn checker_agrees_with_the_brute_force_oracle() {
    let mut compared = 0;
    for k in 1..=2 {
        for len in 0..=2 {
            for (label, ours, theirs) in support::compare_with_oracle(k, len) {
                assert_eq!(ours, theirs, "{label}");
                compared += 1;
            }
        }
    }
    assert!(compared > 300);
}
