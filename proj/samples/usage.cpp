// Generates a small planted benchmark, learns its graph and scores it.

#include <iostream>

#include "acnet/acnet.hpp"

int main() {
    acnet::GenConfig cfg;
    cfg.n_situations = 4;
    cfg.n_emotions = 4;
    cfg.epsilon = 24.0;
    cfg.eta = 2.0;
    cfg.n_c = 1;
    cfg.seed = 7;

    const auto [bundle, truth] = acnet::gen_dataset(cfg);
    const auto learned = acnet::learn_graph(bundle);
    const auto score = acnet::score_graph(learned, truth);

    std::cout << "planted:\n" << truth.graph.to_dot() << "learned:\n" << learned.to_dot();
    std::cout << "precision " << score.precision() << ", recall " << score.recall() << ", F1 " << score.f1() << "\n";
}
