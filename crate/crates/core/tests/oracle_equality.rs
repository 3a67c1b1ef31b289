mod common;

use wordsurprise::verify::verify;
use wordsurprise::MarkovModel;

#[test]
fn random_corpus_matches_oracle() {
    for (i, bytes) in common::corpus(7, 60, 600).iter().enumerate() {
        let (text, index) = common::build(bytes);
        let model = MarkovModel::empirical(&text);
        let (report, analysis) = verify(&text, &index, &model).unwrap();
        assert!(
            report.passed(),
            "text {i} ({:?}): {:?}",
            String::from_utf8_lossy(bytes),
            &report.mismatches[..report.mismatches.len().min(5)]
        );
        assert!(analysis.bound_checks().iter().all(|c| c.holds()), "text {i}");
    }
}
