#include "support.hpp"

#include "tnvote/ledger.hpp"

#include <doctest.h>

using namespace tnvote;
using namespace tnvote::test;

namespace {

const Group& g = Group::test_group();

struct Keys {
    KeyPair alice, bob, joint;
    SeededRng rng{to_bytes("ledger-tests")};

    Keys()
    {
        alice = keygen(g, rng);
        bob = keygen(g, rng);
        joint = keygen(g, rng);
    }
};

WitnessPtr sig_witness(const Scalar& sk, const Transaction& tx, SeededRng& rng)
{
    return w_sig(sign(g, sk, tx.signing_digest(g), rng));
}

} // namespace

TEST_CASE("eval_predicate: hash lock accepts exactly the committed preimage")
{
    Bytes preimage = to_bytes("the committed value");
    auto pred = p_hashlock(hash160(preimage));

    CHECK(eval_predicate(g, *pred, *w_preimage(preimage), {}, 0));
    Bytes wrong = preimage;
    wrong.pop_back();
    CHECK_FALSE(eval_predicate(g, *pred, *w_preimage(wrong), {}, 0));
    // shape mismatch is false, not an error
    Keys k;
    SeededRng rng(to_bytes("shape"));
    CHECK_FALSE(eval_predicate(g, *pred, Witness{WSig{sign(g, k.alice.sk, {}, rng)}}, {}, 0));
}

TEST_CASE("eval_predicate: time-gated key lock")
{
    Keys k;
    SeededRng rng(to_bytes("after"));
    Bytes msg = to_bytes("digest");
    auto pred = p_after(10, p_keylock(k.joint.pk));
    Witness w{WSig{sign(g, k.joint.sk, msg, rng)}};

    CHECK_FALSE(eval_predicate(g, *pred, w, msg, 9)); // valid sig, too early
    CHECK(eval_predicate(g, *pred, w, msg, 10));
    CHECK(eval_predicate(g, *pred, w, msg, 500));
}

TEST_CASE("eval_predicate: deposit-style disjunction")
{
    Keys k;
    SeededRng rng(to_bytes("deposit-pred"));
    Bytes vote = to_bytes("serialized vote ciphertext");
    Bytes msg = to_bytes("digest");
    auto pred = p_or(p_hashlock(hash160(vote)), p_after(50, p_keylock(k.joint.pk)));

    // reveal branch works at any time
    auto reveal = w_branch(false, w_preimage(vote));
    CHECK(eval_predicate(g, *pred, *reveal, msg, 0));
    CHECK(eval_predicate(g, *pred, *reveal, msg, 1000));

    // seizure branch only after the deadline
    auto seize = w_branch(true, w_sig(sign(g, k.joint.sk, msg, rng)));
    CHECK_FALSE(eval_predicate(g, *pred, *seize, msg, 49));
    CHECK(eval_predicate(g, *pred, *seize, msg, 50));
}

TEST_CASE("eval_predicate: conjunction wants both witnesses")
{
    Keys k;
    SeededRng rng(to_bytes("and-pred"));
    Bytes preimage = to_bytes("x");
    Bytes msg = to_bytes("digest");
    auto pred = p_and(p_hashlock(hash160(preimage)), p_keylock(k.alice.pk));

    auto good = w_pair(w_preimage(preimage), w_sig(sign(g, k.alice.sk, msg, rng)));
    CHECK(eval_predicate(g, *pred, *good, msg, 0));
    auto bad = w_pair(w_preimage(to_bytes("y")), w_sig(sign(g, k.alice.sk, msg, rng)));
    CHECK_FALSE(eval_predicate(g, *pred, *bad, msg, 0));
    CHECK_FALSE(eval_predicate(g, *pred, *w_preimage(preimage), msg, 0));
}

TEST_CASE("predicate depth cap")
{
    auto pred = p_hashlock(hash160(to_bytes("x")));
    for (int i = 0; i < 7; ++i)
        pred = p_after(i, pred);
    CHECK(predicate_depth(*pred) == 8);
    CHECK_THROWS_AS(p_after(99, pred), std::invalid_argument);
}

TEST_CASE("txid ignores witnesses; pre-signed spends stay valid")
{
    Keys k;
    SeededRng rng(to_bytes("txid"));
    LedgerState ledger = LedgerState::genesis(
        "txid-test", {TxOutput{5, p_keylock(k.alice.pk)}});
    OutPoint funding = ledger.utxos().begin()->first;

    Transaction tx;
    tx.inputs.push_back(TxInput{funding, nullptr});
    tx.outputs.push_back(TxOutput{5, p_keylock(k.bob.pk)});

    Digest32 unsigned_id = tx.txid(g);
    tx.inputs[0].witness = sig_witness(k.alice.sk, tx, rng);
    CHECK(tx.txid(g) == unsigned_id);
    CHECK(ledger.validate_tx(g, tx).ok);
}

TEST_CASE("validate_tx rejection reasons")
{
    Keys k;
    SeededRng rng(to_bytes("validate"));
    LedgerState ledger = LedgerState::genesis(
        "validate-test", {TxOutput{5, p_keylock(k.alice.pk)},
                          TxOutput{3, p_keylock(k.alice.pk)}});
    auto it = ledger.utxos().begin();
    OutPoint op0 = it->first;
    OutPoint op1 = std::next(it)->first;

    SUBCASE("missing utxo")
    {
        Transaction tx;
        tx.inputs.push_back(TxInput{OutPoint{Digest32{}, 7}, nullptr});
        tx.outputs.push_back(TxOutput{5, p_keylock(k.bob.pk)});
        tx.inputs[0].witness = sig_witness(k.alice.sk, tx, rng);
        auto v = ledger.validate_tx(g, tx);
        CHECK_FALSE(v.ok);
        CHECK(v.reason == RejectReason::missing_utxo);
    }

    SUBCASE("double spend within tx")
    {
        Transaction tx;
        tx.inputs.push_back(TxInput{op0, nullptr});
        tx.inputs.push_back(TxInput{op0, nullptr});
        tx.outputs.push_back(TxOutput{10, p_keylock(k.bob.pk)});
        auto v = ledger.validate_tx(g, tx);
        CHECK_FALSE(v.ok);
        CHECK(v.reason == RejectReason::double_spend_within_tx);
    }

    SUBCASE("locktime not reached")
    {
        Transaction tx;
        tx.locktime = 10;
        tx.inputs.push_back(TxInput{op0, nullptr});
        tx.outputs.push_back(TxOutput{5, p_keylock(k.bob.pk)});
        tx.inputs[0].witness = sig_witness(k.alice.sk, tx, rng);
        auto v = ledger.advance_clock(9).validate_tx(g, tx);
        CHECK_FALSE(v.ok);
        CHECK(v.reason == RejectReason::locktime_not_reached);
        // timelock monotonicity: same tx, later clock, accepted
        CHECK(ledger.advance_clock(10).validate_tx(g, tx).ok);
    }

    SUBCASE("script failure carries the input index")
    {
        Transaction tx;
        tx.inputs.push_back(TxInput{op0, nullptr});
        tx.inputs.push_back(TxInput{op1, nullptr});
        tx.outputs.push_back(TxOutput{8, p_keylock(k.bob.pk)});
        tx.inputs[0].witness = sig_witness(k.alice.sk, tx, rng);
        tx.inputs[1].witness = sig_witness(k.bob.sk, tx, rng); // wrong key
        auto v = ledger.validate_tx(g, tx);
        CHECK_FALSE(v.ok);
        CHECK(v.reason == RejectReason::script_failure);
        CHECK(v.input_index == 1);
    }

    SUBCASE("value mismatch")
    {
        Transaction tx;
        tx.inputs.push_back(TxInput{op0, nullptr});
        tx.outputs.push_back(TxOutput{4, p_keylock(k.bob.pk)});
        tx.inputs[0].witness = sig_witness(k.alice.sk, tx, rng);
        auto v = ledger.validate_tx(g, tx);
        CHECK_FALSE(v.ok);
        CHECK(v.reason == RejectReason::value_mismatch);
    }
}

TEST_CASE("apply_tx conserves value and spends outpoints permanently")
{
    Keys k;
    SeededRng rng(to_bytes("apply"));
    LedgerState ledger = LedgerState::genesis(
        "apply-test", {TxOutput{5, p_keylock(k.alice.pk)}});
    OutPoint funding = ledger.utxos().begin()->first;
    std::uint64_t before = ledger.total_value();

    Transaction tx;
    tx.inputs.push_back(TxInput{funding, nullptr});
    tx.outputs.push_back(TxOutput{2, p_keylock(k.bob.pk)});
    tx.outputs.push_back(TxOutput{3, p_keylock(k.alice.pk)});
    tx.inputs[0].witness = sig_witness(k.alice.sk, tx, rng);

    LedgerState next = ledger.apply_tx(g, tx);
    CHECK(next.total_value() == before);
    CHECK(next.history().size() == ledger.history().size() + 1);
    CHECK_FALSE(next.is_unspent(funding));
    CHECK(next.balance_of(g, k.bob.pk) == 2);

    // replaying the same accepted transaction must fail
    auto v = next.validate_tx(g, tx);
    CHECK_FALSE(v.ok);
    CHECK(v.reason == RejectReason::missing_utxo);

    // applying without acceptance is a contract violation
    CHECK_THROWS_AS(next.apply_tx(g, tx), std::logic_error);
}

TEST_CASE("advance_clock changes nothing but the clock")
{
    Keys k;
    LedgerState ledger = LedgerState::genesis(
        "clock-test", {TxOutput{5, p_keylock(k.alice.pk)}});
    LedgerState same = ledger.advance_clock(0);
    CHECK(same.clock() == ledger.clock());
    CHECK(same.total_value() == ledger.total_value());
    CHECK(same.utxos().size() == ledger.utxos().size());
    LedgerState later = ledger.advance_clock(42);
    CHECK(later.clock() == 42);
    CHECK(later.total_value() == ledger.total_value());
    CHECK(later.history().empty());
}

TEST_CASE("predicate rendering is readable")
{
    Keys k;
    Bytes v = to_bytes("vote");
    auto pred = p_or(p_hashlock(hash160(v)), p_after(7, p_keylock(k.joint.pk)));
    std::string text = render_predicate(*pred);
    CHECK(text.find("hash160(") != std::string::npos);
    CHECK(text.find("after 7") != std::string::npos);
    CHECK(text.find(" or ") != std::string::npos);
}
