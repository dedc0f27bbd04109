#include <gtest/gtest.h>

#include "qsmpc/transcript_io.hpp"

using namespace qsmpc;

namespace {

ProtocolTranscript sample(const NoiseModel& noise = {}) {
  return run_protocol({4, 3, {1, 0, 1, 1}, {1, 1, 0, 0}, 1234, noise});
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) s.replace(pos, from.size(), to);
  return s;
}

}  // namespace

TEST(Transcript, RoundTripIsExact) {
  for (const NoiseModel noise : {NoiseModel{}, NoiseModel{0.1, 0.05}}) {
    const auto t = sample(noise);
    const auto text = serialize(t);
    const auto back = parse_transcript(text);
    EXPECT_EQ(serialize(back), text);
    ASSERT_EQ(back.log.size(), t.log.size());
    for (std::size_t i = 0; i < t.log.size(); ++i) EXPECT_TRUE(messages_match(back.log[i], t.log[i], 0.0));
    EXPECT_EQ(back.outputs, t.outputs);
    EXPECT_EQ(back.counters, t.counters);
    EXPECT_EQ(back.setup.x, t.setup.x);
    EXPECT_EQ(back.setup.r, t.setup.r);
    EXPECT_EQ(back.setup.seed, t.setup.seed);
    EXPECT_EQ(back.setup.noise, t.setup.noise);
    EXPECT_EQ(replay(back), t.outputs);
  }
}

TEST(Transcript, LineLayout) {
  const auto text = serialize(sample());
  EXPECT_EQ(text.substr(0, text.find('\n')), "#qsmpc-transcript\tv1");
  EXPECT_NE(text.find("\nClassicalShare\tC1\tC2\tx_share="), std::string::npos);
  EXPECT_NE(text.find("\nQubitHop\tS\tC1\tamp0=1,0\tamp1=0,0\n"), std::string::npos);
  EXPECT_NE(text.find("\nAggregateReport\tC1\tC4\tx_tilde="), std::string::npos);
  EXPECT_NE(text.find("\nAnnouncement\tS\t*\tvalue="), std::string::npos);
  EXPECT_NE(text.find("\nMaskBroadcast\tC4\t*\tr_tilde="), std::string::npos);
  EXPECT_NE(text.find("\nCounters\t-\t-\tqubits_used=1\t"), std::string::npos);
}

TEST(Transcript, ParsedTamperIsCaughtByReplay) {
  const auto text = serialize(sample());
  const auto tampered = replace_once(text, "QubitHop\tS\tC1\tamp0=1,0", "QubitHop\tS\tC1\tamp0=0.99999,0");
  EXPECT_THROW(replay(parse_transcript(tampered)), ReplayDivergence);
}

TEST(Transcript, RejectsMalformedText) {
  const auto text = serialize(sample());
  EXPECT_THROW(parse_transcript(""), ParseError);
  EXPECT_THROW(parse_transcript(replace_once(text, "\tv1", "\tv2")), ParseError);
  EXPECT_THROW(parse_transcript(replace_once(text, "Announcement", "Annoucement")), ParseError);
  EXPECT_THROW(parse_transcript(replace_once(text, "x_tilde=", "x_tild=")), ParseError);
  EXPECT_THROW(parse_transcript(replace_once(text, "\tC1\tC2\t", "\tC1\tQ2\t")), ParseError);
  EXPECT_THROW(parse_transcript(replace_once(text, "value=", "value=7")), ParseError);
  EXPECT_THROW(parse_transcript(replace_once(text, "amp1=0,0", "amp1=0;0")), ParseError);
  EXPECT_THROW(parse_transcript(replace_once(text, "n=4", "n=x")), ParseError);
  EXPECT_THROW(parse_transcript(text.substr(0, text.find("Counters"))), ParseError);
  const auto setup_line = text.substr(text.find("Setup"), text.find('\n', text.find("Setup")) - text.find("Setup") + 1);
  EXPECT_THROW(parse_transcript(replace_once(text, setup_line, "")), ParseError);
}

TEST(Transcript, ToleratesCrlf) {
  auto text = serialize(sample());
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  EXPECT_EQ(serialize(parse_transcript(crlf)), text);
}
