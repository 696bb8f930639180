"""Train all eight classifiers on one split and compare their metrics.

Uses the noisy Sleep Deprivation fixture so the scores land in the same
modest range as real questionnaire data.
"""
from sleepbench import harness
from sleepbench.classic import TrainConfig, predict, train
from sleepbench.convnet import CnnTrainConfig, build_cnn, predict_cnn, train_cnn
from sleepbench.dataio import make_fixture, parse_csv
from sleepbench.metrics import evaluate, render_percent
from sleepbench.preprocess import prepare
from sleepbench.tensor import Rng

text = make_fixture("sleep_deprivation", 86, Rng(4), noise=harness.MODERATE_NOISE)
split = prepare(parse_csv(text, "sleep_deprivation"), seed=1)
Xtr, ytr = split.train.features, split.train.labels
Xte, yte = split.test.features, split.test.labels

for clf in harness.CLASSIFIERS:
    if clf.startswith("conv1d"):
        init_rng, drop_rng = Rng(("demo", clf)).spawn(2)
        cfg = CnnTrainConfig()
        model = train_cnn(build_cnn(clf, Xtr.shape[1], cfg, init_rng), Xtr, ytr, cfg, drop_rng)
        pred = predict_cnn(model, Xte)
    elif clf in ("knn1", "knn10"):
        pred = predict(train("knn", Xtr, ytr, TrainConfig(k=int(clf[3:]))), Xte)
    else:
        pred = predict(train(clf, Xtr, ytr, TrainConfig()), Xte)
    report = evaluate(pred, yte)
    print(f"{harness.CLASSIFIER_LABELS[clf]:<20} AC {render_percent(report.ac):>7}  "
          f"F1 {render_percent(report.f1):>7}")
