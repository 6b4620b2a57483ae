#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ontograde/corpus.hpp"
#include "ontograde/error.hpp"
#include "ontograde/ontology.hpp"
#include "ontograde/preprocess.hpp"

namespace ontograde {

/// A question template for synthetic corpora; concepts refer to data/cg_ontology.tsv.
struct SynthQuestion {
  std::string_view id;
  QuestionType type;
  std::string_view main_concept;
  std::string_view text;
  std::string_view model_answer;
};

inline constexpr SynthQuestion kSynthQuestionBank[] = {
    {"display_device", QuestionType::Long, "display_device", "Describe common display devices and how they work.",
     "A display device presents graphical output to the viewer. A cathode ray tube is a vacuum glass envelope with "
     "a fluorescent front face. Its electron gun has a heated filament that releases electrons. An electrostatic "
     "focusing lens converges the stream. The deflection system uses magnetic coils to steer it horizontally and "
     "vertically. A coating on the inner surface shines where struck. Together these parts explain the working of a "
     "CRT. A plasma panel has neon filled cells between electrodes that glow when voltage is applied. Ionized gas "
     "gives off ultraviolet radiation that excites phosphors. Liquid crystals polarize light passing through an LCD. "
     "Passive addressing uses a grid of row and column conductors for each segment. An active matrix puts a thin "
     "film transistor at every pixel to hold its charge."},
    {"crt", QuestionType::Long, "crt", "Explain the parts of a cathode ray tube.",
     "A cathode ray tube is a vacuum glass envelope with a fluorescent front face. Its electron gun has a heated "
     "filament that emits electrons. An electrostatic focusing lens converges the stream. The deflection system uses "
     "magnetic coils to steer it horizontally and vertically. A phosphor coating on the inner surface glows where "
     "struck. The screen is refreshed sixty times per second in the working of a CRT."},
    {"applications", QuestionType::Short, "computer_graphics_applications", "List applications of computer graphics.",
     "Graphics has practical uses in industry and entertainment. Image processing modifies or interprets existing "
     "photographs. Computer aided design produces engineering drafts of buildings and aircraft. Animation shows a "
     "sequence of frames in rapid succession. In keyframing an artist draws key poses and software interpolates the "
     "inbetweens. Morphing is a gradual transformation of one shape into another. Motion capture uses sensors on a "
     "performer to record real movement."},
    {"types_of_media", QuestionType::Long, "types_of_media", "Compare the ways a picture can be stored.",
     "Media types are ways of representing a stored picture. Raster images hold a grid of pixels in a frame buffer. "
     "A bitmap suits photos and paintings. Vector images are line segments drawn from endpoint coordinates. Random "
     "scan output is made of calligraphic strokes traced directly."},
    {"input_device", QuestionType::Short, "input_device", "Describe graphics input devices.",
     "An input device lets the user feed data to the computer. A mouse tracks hand movement on a desk with a "
     "rolling ball. A light pen is a pencil shaped wand that detects the screen glow. A digitizer tablet records the "
     "coordinates of a stylus traced over a flat board. A keyboard is used for typing characters and commands."},
    {"working_of_crt", QuestionType::Essay, "working_of_crt", "Describe the working of a CRT.",
     "The working of a CRT is a chain of events. Electron emission starts when the heated filament of the gun "
     "releases electrons. Beam focusing follows as an electrostatic lens converges the stream. Beam deflection comes "
     "next as magnetic coils steer it horizontally and vertically. Phosphor excitation occurs where the inner "
     "surface coating is struck. A light spot finally appears on the glass face."},
    {"lcd", QuestionType::Short, "lcd", "How does a liquid crystal display work?",
     "Liquid crystals polarize light passing through the panel. In a twisted nematic cell the molecules rotate "
     "incoming waves by ninety degrees. Passive addressing uses a grid of row and column conductors for each "
     "segment. An active matrix puts a thin film transistor at every pixel to hold its charge."},
    {"animation", QuestionType::Short, "animation", "Explain animation techniques.",
     "Animation shows a sequence of frames in rapid succession. In keyframing an artist draws key poses and software "
     "interpolates the inbetweens. Morphing is a gradual transformation of one shape into another. Motion capture "
     "uses sensors on a performer to record real movement."},
    {"systems", QuestionType::Short, "computer_graphics_systems", "Describe the hardware of a graphics system.",
     "These systems are hardware supporting interactive picture generation. Displays present output to the viewer. "
     "A cathode ray tube is a vacuum glass envelope with a fluorescent front face. A plasma panel has neon filled "
     "cells between electrodes excited by voltage. Liquid crystals polarize the passing illumination. Passive "
     "addressing uses a grid of row and column conductors for each segment. An active matrix puts a thin film "
     "transistor at every pixel to hold its charge. Input devices let the user feed data to the computer. A mouse "
     "tracks hand movement on a desk with a rolling ball. A light pen is a pencil shaped wand that detects the "
     "screen glow. A digitizer tablet records the coordinates of a stylus traced over a flat board. A keyboard is "
     "used for typing characters and commands."},
    {"image_processing", QuestionType::Essay, "image_processing", "What is image processing?",
     "Image processing modifies or interprets existing photographs. Color coding highlights regions with false "
     "colors. Machine perception lets software recognize objects. Rearranging picture parts builds a new "
     "composition. Improving the quality of shading smooths gradients. Related applications include computer aided "
     "design and animation."},
};

/// Off-topic vocabulary used in place of dropped model-answer words.
inline constexpr std::string_view kDistractorWords[] = {
    "banana",  "river",   "guitar",   "football", "pepper",  "mountain", "violin",  "harbor",  "tomato",
    "cricket", "glacier", "saxophone", "orchard", "lemon",   "wrestling", "canyon", "cello",   "garlic",
    "tennis",  "volcano", "trumpet",  "meadow",   "carrot",  "hockey",   "desert",  "flute",   "onion",
    "rugby",   "island",  "drum",     "prairie",  "cabbage", "golf",     "lagoon",  "harp",    "spinach",
    "skating", "forest",  "banjo",    "pumpkin",  "sailing", "valley",   "oboe",    "ginger",  "boxing",
    "tundra",  "piano",   "radish",   "archery",  "swamp",   "ukulele",  "celery",  "fencing", "delta",
    "mango",   "cactus",  "walnut",   "kayak",    "pebble",  "biscuit",
};

struct SynthOptions {
  std::uint64_t seed = 1;
  std::size_t n_answers = 60;
  /// Retained fraction per answer, cycled; empty selects i / (n - 1).
  std::vector<double> overlap_schedule;
  std::size_t question = 0;  ///< index into kSynthQuestionBank
  double max_marks = 10.0;
};

inline std::vector<double> uniform_schedule(std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 1.0;
  return s;
}

/// Each answer keeps the first round(p * L) of the model answer's L words
/// (a truncated answer) and fills every later position with a seeded random
/// distractor word. The human score is p * max_marks.
inline Corpus synthesize_corpus(const SynthOptions& opt) {
  if (opt.question >= std::size(kSynthQuestionBank)) throw UsageError("synthetic question index out of range");
  std::vector<double> schedule = opt.overlap_schedule.empty() ? uniform_schedule(opt.n_answers) : opt.overlap_schedule;
  if (schedule.empty()) throw UsageError("overlap schedule must not be empty");
  for (double p : schedule)
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("overlap fractions must lie in [0, 1]");

  const SynthQuestion& q = kSynthQuestionBank[opt.question];
  Corpus c;
  c.question_id = std::string(q.id);
  c.question_text = std::string(q.text);
  c.question_type = q.type;
  c.main_concept = std::string(q.main_concept);
  c.max_marks = opt.max_marks;
  c.model_answers.emplace_back(q.model_answer);

  const auto words = tokenize(q.model_answer);
  std::mt19937_64 rng(opt.seed * 0x2545F4914F6CDD1DULL + opt.question);
  for (std::size_t i = 0; i < opt.n_answers; ++i) {
    const double p = schedule[i % schedule.size()];
    const auto keep = static_cast<std::size_t>(std::lround(p * static_cast<double>(words.size())));
    std::string text;
    for (std::size_t k = 0; k < words.size(); ++k) {
      if (k) text += ' ';
      text += k < keep ? words[k] : std::string(kDistractorWords[rng() % std::size(kDistractorWords)]);
    }
    char id[32];
    std::snprintf(id, sizeof id, "s%03zu", i + 1);
    c.student_answers.push_back(StudentAnswer{id, std::move(text), p * opt.max_marks, false});
  }
  return c;
}

/// `questions` corpora over the question bank, each with its own seed.
inline std::vector<Corpus> synthesize_corpora(std::uint64_t seed, std::size_t questions, std::size_t n_answers) {
  if (questions > std::size(kSynthQuestionBank)) throw UsageError("at most 10 synthetic questions are available");
  std::vector<Corpus> out;
  for (std::size_t q = 0; q < questions; ++q) {
    SynthOptions opt;
    opt.seed = seed + q;
    opt.n_answers = n_answers;
    opt.question = q;
    out.push_back(synthesize_corpus(opt));
  }
  return out;
}

}  // namespace ontograde
