"""Smoke tests for the ocrl python module.

Run as: python3 smoke_test.py <module-dir> [repo-root]
"""

import math
import os
import subprocess
import sys
import tempfile

MODULE_DIR = sys.argv[1] if len(sys.argv) > 1 else "build/bindings"
REPO_ROOT = sys.argv[2] if len(sys.argv) > 2 else "."
sys.path.insert(0, MODULE_DIR)

import ocrl  # noqa: E402


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def test_mdp_and_exact_values():
    # single state, self-loop, r=1, gamma=0.5 -> Q = 2
    mdp = ocrl.TabularMDP.from_text("mdp 1 1 0.5\nt 0 0 0 1\nr 0 0 1\nstart 0 1\n")
    assert ocrl.validate(mdp) == []
    policy = ocrl.IntraOptionPolicy(1, 1, 1, 1.0)
    term = ocrl.TerminationFunction(1, 1)
    model = ocrl.OptionModel(mdp, policy, term, [[1.0]])
    values = ocrl.exact_values(model)
    approx(values.q_omega[0][0], 2.0)
    approx(values.rho, 2.0)


def test_analytic_gradients_match_fd():
    text = (
        "mdp 3 2 0.8\n"
        "t 0 0 1 0.7\nt 0 0 2 0.3\nt 0 1 0 1\n"
        "t 1 0 2 1\nt 1 1 0 0.5\nt 1 1 1 0.5\n"
        "t 2 0 0 1\nt 2 1 2 1\n"
        "r 0 0 1\nr 1 1 -0.5\nr 2 0 0.25\n"
        "start 0 1\n"
    )
    mdp = ocrl.TabularMDP.from_text(text)
    policy = ocrl.IntraOptionPolicy(2, 2, 3, 1.0)
    policy.weights = [[[0.3, -0.2, 0.5], [0.0, 0.4, -0.1]],
                      [[-0.3, 0.1, 0.0], [0.2, -0.4, 0.6]]]
    term = ocrl.TerminationFunction(2, 3)
    term.weights = [[0.2, -0.1, 0.4], [-0.5, 0.3, 0.1]]
    pi_omega = [[0.7, 0.3], [0.5, 0.5], [0.2, 0.8]]
    model = ocrl.OptionModel(mdp, policy, term, pi_omega)

    start = ocrl.start_pair_weights(model)
    g1 = ocrl.intra_policy_gradient(model, start)
    fd1 = ocrl.fd_intra_policy_gradient(model, start)
    worst = max(
        abs(g1[w][a][f] - fd1[w][a][f])
        for w in range(2) for a in range(2) for f in range(3)
    )
    assert worst <= 1e-6, worst

    g2 = ocrl.termination_gradient_exact(model, 0, 1)
    fd2 = ocrl.fd_termination_gradient(model, 0, 1)
    worst2 = max(abs(g2[w][f] - fd2[w][f]) for w in range(2) for f in range(3))
    assert worst2 <= 1e-6, worst2

    chain = ocrl.build_chain(model)
    for row in chain.p1_same:
        approx(sum(row), 0.8, tol=1e-12)


def test_verify_battery():
    report = ocrl.run_verify(instances=5, seed=11)
    assert report.pass_
    assert report.worst_intra_grad <= 1e-5
    assert report.worst_term_grad <= 1e-5


def test_features_and_policies():
    fmap = ocrl.FeatureMap.fourier(2, 3)
    assert fmap.n_features == 16
    feats = fmap.featurize([0.0, 0.0])
    assert all(abs(f - 1.0) < 1e-12 for f in feats)

    onehot = ocrl.FeatureMap.one_hot(4)
    assert list(onehot.featurize(2)) == [0.0, 0.0, 1.0, 0.0]

    pol = ocrl.IntraOptionPolicy(1, 4, 4, 0.5)
    probs = pol.action_probs(onehot, 0, 2)
    assert all(abs(p - 0.25) < 1e-12 for p in probs)
    approx(pol.entropy(onehot, 0, 2), math.log(4.0))

    term = ocrl.TerminationFunction(1, 4)
    approx(term.term_prob(onehot, 0, 1), 0.5)

    sel = ocrl.PolicyOverOptions(0.0)
    rng = ocrl.RngStream(5)
    assert sel.select([1.0, 3.0, 2.0], rng) == 1


def test_fourrooms_training_is_deterministic():
    a = ocrl.train_fourrooms(options=2, episodes=12, seed=3)
    b = ocrl.train_fourrooms(options=2, episodes=12, seed=3)
    assert [log["steps"] for log in a] == [log["steps"] for log in b]
    assert all(sum(log["option_usage"]) == log["steps"] for log in a)


def test_cli_end_to_end():
    oc = os.path.join(MODULE_DIR, "..", "tools", "oc")
    if not os.path.exists(oc):
        print("skipping CLI check (binary not found)")
        return
    with tempfile.TemporaryDirectory() as tmp:
        cfg = os.path.join(tmp, "run.cfg")
        with open(cfg, "w") as f:
            f.write(
                "[run]\nenv = fourrooms\nruns = 1\nepisodes = 5\nbase_seed = 4\n"
                "output_dir = unused\n[agent]\noptions = 2\n"
            )
        env = dict(os.environ, OC_OUTPUT_DIR=os.path.join(tmp, "out"))
        proc = subprocess.run([oc, "train", cfg], env=env, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        csv = os.path.join(tmp, "out", "run_0.csv")
        assert os.path.exists(csv), "OC_OUTPUT_DIR override not honored"
        with open(csv) as f:
            header = f.readline().strip()
        assert header == ("episode,steps,undiscounted_return,discounted_return,"
                          "option_switches,mean_option_duration")

        proc = subprocess.run([oc, "verify", "--instances", "3"], capture_output=True,
                              text=True)
        assert proc.returncode == 0, proc.stdout + proc.stderr
        assert "VERIFY PASS" in proc.stdout

        ckpt = os.path.join(tmp, "out", "run_0.ckpt")
        proc = subprocess.run([oc, "heatmap", ckpt], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        lines = proc.stdout.splitlines()
        assert lines[0] == "option,row,col,beta"
        betas = [float(line.rsplit(",", 1)[1]) for line in lines[1:]]
        assert len(betas) == 2 * 13 * 13
        assert all(b == -1.0 or 0.0 < b < 1.0 for b in betas)

        bad = subprocess.run([oc, "train", os.path.join(tmp, "missing.cfg")],
                             capture_output=True, text=True)
        assert bad.returncode == 2


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok: {test.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
