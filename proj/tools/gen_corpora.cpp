// Regenerates the bundled corpora under data/.  Everything here is a fixed
// seed, so the checked-in files are reproducible.

#include <fstream>
#include <iostream>
#include <string>

#include "plantner/corpus.hpp"
#include "plantner/synthetic.hpp"

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "data";

  using namespace plantner;
  const auto separable = synthetic_separable_corpus(600, 20250611);
  const auto imbalanced = synthetic_imbalanced_corpus(700, 20250612);

  auto write = [&](const std::string& name, const std::string& content) {
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << path << '\n';
      std::exit(1);
    }
    out << content;
    std::cout << "wrote " << path << '\n';
  };

  write("separable.conll", serialize_conll(separable));
  write("imbalanced.conll", serialize_conll(imbalanced));

  auto merged = separable;
  for (auto doc : imbalanced) {
    doc.id = "imb-" + doc.id;
    merged.push_back(std::move(doc));
  }
  synthetic_vocab(merged).save(out_dir + "/subword_vocab.txt");
  std::cout << "wrote " << out_dir << "/subword_vocab.txt\n";
  return 0;
}
